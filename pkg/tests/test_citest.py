"""Tests for the CI testers and their accounting."""

from itertools import chain, combinations

import numpy as np
import pytest

from citest import get_tester, list_testers
from citest.base import CiQuery
from citest.data import read_data_csv, write_data_csv
from citest.fisherz import (FisherZTester, fisherz_independent, fisherz_test,
                            partial_correlation)
from citest.oracle import OracleTester, oracle_independent
from citest.unfaithful import UnfaithfulOracleTester, unfaithful_oracle_independent
from graph import d_separated
from synth import SemModel, population_covariance, unfaithful_weights
from utils.errors import (CiTestError, ConfigurationError, InsufficientSamplesError,
                          SingularCovarianceError)


class TestCiQuery:
    """Tests for query canonicalization."""

    def test_make_orders_endpoints(self):
        """Test endpoints are sorted and stripped from the conditioning set."""
        q = CiQuery.make(3, 1, [2, 3, 0, 2, 1])
        assert q == CiQuery(1, 3, (0, 2))

    def test_equal_endpoints_raise(self):
        """Test that u == v raises CiTestError."""
        with pytest.raises(CiTestError):
            CiQuery.make(2, 2)

    def test_str(self):
        """Test the readable form."""
        assert str(CiQuery.make(0, 2, [1])) == "0 _||_ 2 | {1}"


class TestAccounting:
    """Tests for memoization and query counting in the base tester."""

    def test_canonical_duplicates_count_once(self, chain_dag):
        """Test that symmetric and reordered queries are one distinct query."""
        tester = OracleTester(chain_dag)
        assert tester.independent(0, 2, [1]) == tester.independent(2, 0, [1, 1])
        stats = tester.stats()
        assert stats.distinct_queries == 1
        assert stats.total_calls == 2
        assert stats.query_log == [CiQuery(0, 2, (1,))] * 2

    def test_distinct_matches_log(self, worked_dag):
        """Test that the distinct count equals the unique entries of the log."""
        tester = OracleTester(worked_dag)
        for u, v in combinations(range(5), 2):
            tester.independent(u, v, [])
            tester.independent(v, u, [x for x in range(5) if x not in (u, v)])
            tester.independent(u, v, [])
        stats = tester.stats()
        assert stats.distinct_queries == len(set(stats.query_log))
        assert stats.distinct_queries <= stats.total_calls

    def test_memo_does_not_change_answers(self, worked_dag):
        """Test identical answers with and without the cache."""
        cached, uncached = OracleTester(worked_dag), OracleTester(worked_dag, memoize=False)
        for u, v in combinations(range(5), 2):
            for c in ([], [2], [3, 4]):
                assert cached.independent(u, v, c) == uncached.independent(u, v, c)
                assert cached.independent(u, v, c) == uncached.independent(u, v, c)

    def test_out_of_range_raises(self, chain_dag):
        """Test that queries outside 0..p-1 raise CiTestError."""
        with pytest.raises(CiTestError, match="out of range"):
            OracleTester(chain_dag).independent(0, 5)

    def test_reset_and_asked(self, chain_dag):
        """Test asked() and reset()."""
        tester = OracleTester(chain_dag, record_log=False)
        tester.independent(0, 1)
        assert tester.asked(CiQuery(0, 1))
        assert tester.stats().query_log is None
        tester.reset()
        assert not tester.asked(CiQuery(0, 1))
        assert tester.stats().to_dict() == {"distinct_ci": 0, "total_ci": 0}


class TestOracle:
    """Tests for the d-separation oracle."""

    def test_collider(self, collider_dag):
        """Test marginal independence and conditional dependence at a collider."""
        assert oracle_independent(collider_dag, CiQuery.make(0, 2))
        assert not oracle_independent(collider_dag, CiQuery.make(0, 2, [1]))

    def test_worked_example_removal(self, worked_dag):
        """Test 0 _||_ 3 given the prefix {1} and witness {2}."""
        assert oracle_independent(worked_dag, CiQuery.make(0, 3, [1, 2]))

    def test_equals_d_separation(self, worked_dag):
        """Test oracle answers against d-separation on every query."""
        tester = OracleTester(worked_dag)
        for u, v in combinations(range(5), 2):
            others = [x for x in range(5) if x not in (u, v)]
            for c in chain.from_iterable(combinations(others, k) for k in range(4)):
                assert tester.independent(u, v, c) == d_separated(worked_dag, {u}, {v}, c)


class TestUnfaithfulOracle:
    """Tests for the injected-independence oracle."""

    def test_injected_statement(self, unfaithful_dag):
        """Test the injected statement reads as independent."""
        extra = {CiQuery.make(0, 1, [2, 3])}
        assert unfaithful_oracle_independent(unfaithful_dag, extra, CiQuery.make(0, 1, [3, 2]))

    def test_other_statements_follow_graph(self, unfaithful_dag):
        """Test that other statements are answered by d-separation."""
        tester = UnfaithfulOracleTester(unfaithful_dag, [(0, 1, (2, 3))])
        assert tester.dependent(0, 1)
        assert tester.independent(0, 2)

    def test_empty_injection_is_oracle(self, worked_dag):
        """Test that no injections reproduce the plain oracle."""
        tester = UnfaithfulOracleTester(worked_dag)
        for u, v in combinations(range(5), 2):
            for c in ([], [2], [2, 3]):
                q = CiQuery.make(u, v, c)
                assert tester.ask(q) == oracle_independent(worked_dag, q)

    def test_redundant_injection_warns(self, collider_dag, caplog):
        """Test a warning when an injected statement already holds."""
        UnfaithfulOracleTester(collider_dag, [(0, 2, ())])
        assert "already holds" in caplog.text


class TestFisherZ:
    """Tests for the Fisher-z partial correlation tester."""

    def test_zero_correlation_is_independent(self):
        """Test that r = 0 gives statistic 0 and p-value 1."""
        tester = FisherZTester.from_covariance(np.eye(3), n=100)
        result = tester.test(CiQuery.make(0, 1, [2]))
        assert result.statistic == 0.0
        assert result.pvalue == pytest.approx(1.0)
        assert tester.independent(0, 1, [2])

    def test_population_dependence(self):
        """Test x -> y with weight 0.5 is dependent at n = 10000."""
        cov = np.array([[1.0, 0.5], [0.5, 1.25]])
        tester = FisherZTester.from_covariance(cov, n=10000)
        assert partial_correlation(tester.corr, 0, 1, []) == pytest.approx(0.5 / np.sqrt(1.25))
        assert tester.dependent(0, 1)

    def test_insufficient_samples(self):
        """Test that n <= |cond| + 3 raises InsufficientSamplesError."""
        tester = FisherZTester.from_covariance(np.eye(5), n=4)
        with pytest.raises(InsufficientSamplesError):
            tester.independent(0, 1, [2, 3])

    def test_singular_conditioning_set(self):
        """Test that collinear conditioning raises SingularCovarianceError."""
        cov = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        tester = FisherZTester.from_covariance(cov, n=100)
        with pytest.raises(SingularCovarianceError):
            tester.independent(0, 2, [1])

    def test_constant_column(self):
        """Test that a constant column raises SingularCovarianceError."""
        rng = np.random.default_rng(0)
        data = np.column_stack([rng.standard_normal(50), np.ones(50)])
        with pytest.raises(SingularCovarianceError):
            fisherz_independent(data, CiQuery.make(0, 1))

    def test_invalid_alpha(self):
        """Test that alpha outside (0, 1) raises ConfigurationError."""
        with pytest.raises(ConfigurationError):
            FisherZTester(np.zeros((10, 2)), alpha=1.5)

    def test_needs_data_or_correlation(self):
        """Test that a tester without input raises ConfigurationError."""
        with pytest.raises(ConfigurationError):
            FisherZTester()

    def test_pvalue_agrees_with_threshold(self):
        """Test that statistic <= threshold exactly when p-value > alpha."""
        rng = np.random.default_rng(3)
        data = rng.standard_normal((300, 4))
        data[:, 1] += 0.15 * data[:, 0]
        tester = FisherZTester(data, alpha=0.05)
        for u, v in combinations(range(4), 2):
            result = fisherz_test(tester.corr, CiQuery.make(u, v), tester.n)
            assert tester.independent(u, v) == (result.pvalue > 0.05)

    def test_calibration(self):
        """Test the false-dependence rate on independent pairs is near alpha."""
        alpha, seeds = 0.05, 200
        rejections = 0
        for seed in range(seeds):
            data = np.random.default_rng(seed).standard_normal((1000, 2))
            if not fisherz_independent(data, CiQuery.make(0, 1), alpha):
                rejections += 1
        tolerance = 3 * np.sqrt(alpha * (1 - alpha) / seeds)
        assert abs(rejections / seeds - alpha) <= tolerance

    def test_unfaithful_weights_cancel(self):
        """Test that the cancelling weights induce X0 _||_ X1 | {X2, X3}."""
        model = unfaithful_weights()
        tester = FisherZTester.from_covariance(population_covariance(model), n=10 ** 6)
        assert tester.independent(0, 1, [2, 3])
        assert tester.dependent(0, 1)
        assert tester.dependent(0, 3, [1, 2])

    def test_faithful_weights_do_not_cancel(self):
        """Test that breaking the weight identity restores the dependence."""
        model = unfaithful_weights()
        weights = dict(model.weights)
        weights[(0, 1)] = 0.8
        broken = SemModel(dag=model.dag, weights=weights, noise_std=model.noise_std)
        tester = FisherZTester.from_covariance(population_covariance(broken), n=10 ** 6)
        assert tester.dependent(0, 1, [2, 3])


class TestRegistry:
    """Tests for the tester registry."""

    def test_list_testers(self):
        """Test the registered names."""
        assert set(list_testers()) == {"oracle", "fisherz", "unfaithful"}

    def test_get_tester(self, chain_dag):
        """Test creating a tester by name."""
        assert isinstance(get_tester("oracle", chain_dag), OracleTester)

    def test_unknown_tester(self):
        """Test that an unknown name raises ConfigurationError."""
        with pytest.raises(ConfigurationError, match="Unknown tester"):
            get_tester("kernel")


class TestDataFiles:
    """Tests for CSV sample matrices."""

    def test_write_then_read(self, tmp_path):
        """Test that names and values survive a write and read."""
        data = np.array([[0.5, -1.25], [2.0, 3.0]])
        path = tmp_path / "d.csv"
        write_data_csv(data, path, names=["a", "b"])
        names, loaded = read_data_csv(path)
        assert names == ["a", "b"]
        np.testing.assert_array_equal(loaded, data)

    def test_ragged_row(self, tmp_path):
        """Test that a short row raises ConfigurationError."""
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,2\n3\n")
        with pytest.raises(ConfigurationError, match="columns"):
            read_data_csv(path)

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises ConfigurationError."""
        with pytest.raises(ConfigurationError, match="not found"):
            read_data_csv(tmp_path / "missing.csv")
