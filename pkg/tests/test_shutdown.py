"""Tests for shutdown module."""

import signal

import pytest

from shutdown import (install_signal_handlers, is_shutdown_requested, request_shutdown,
                      reset_shutdown, signal_handler)


class TestShutdown:
    """Tests for graceful shutdown functionality."""

    def setup_method(self):
        """Reset shutdown flag before each test."""
        reset_shutdown()

    def teardown_method(self):
        """Reset shutdown flag after each test."""
        reset_shutdown()

    def test_initial_state_is_not_requested(self):
        """Test that initial shutdown state is False."""
        assert is_shutdown_requested() is False

    def test_request_shutdown_sets_flag(self):
        """Test that request_shutdown sets the flag to True."""
        assert is_shutdown_requested() is False

        request_shutdown()

        assert is_shutdown_requested() is True

    def test_reset_shutdown_clears_flag(self):
        """Test that reset_shutdown clears the flag."""
        request_shutdown()
        assert is_shutdown_requested() is True

        reset_shutdown()

        assert is_shutdown_requested() is False

    def test_multiple_requests_remain_true(self):
        """Test that multiple shutdown requests keep flag True."""
        request_shutdown()
        request_shutdown()
        request_shutdown()

        assert is_shutdown_requested() is True


class TestSignalHandling:
    """Tests for the signal handler and its installation."""

    def setup_method(self):
        reset_shutdown()

    def teardown_method(self):
        reset_shutdown()

    def test_first_signal_sets_flag(self, caplog):
        """Test that the first signal only requests a shutdown."""
        signal_handler(signal.SIGINT, None)

        assert is_shutdown_requested() is True
        assert "Shutdown requested" in caplog.text

    def test_second_signal_interrupts(self):
        """Test that a second signal raises KeyboardInterrupt."""
        signal_handler(signal.SIGINT, None)

        with pytest.raises(KeyboardInterrupt):
            signal_handler(signal.SIGTERM, None)

    def test_install_registers_both_signals(self, mocker):
        """Test that SIGINT and SIGTERM are routed to the handler."""
        mock_signal = mocker.patch("shutdown.signal.signal")

        install_signal_handlers()

        mock_signal.assert_any_call(signal.SIGINT, signal_handler)
        mock_signal.assert_any_call(signal.SIGTERM, signal_handler)
