from unittest.mock import patch

import pytest

from app import main, run


def test_main_checks_constants_and_dispatches():
    """main checks constants, initializes logging and returns the command's exit code."""
    with patch("app.check_variables") as mock_check, patch("app.LogHandler") as mock_handler, patch(
        "app.run_cli", return_value=0
    ) as mock_run:
        assert main(["train", "--manifest", "m.json"]) == 0

    mock_check.assert_called_once()
    mock_handler.assert_called_once()
    mock_run.assert_called_once_with(["train", "--manifest", "m.json"])


def test_run_exits_with_main_code():
    with patch("app.main", return_value=2):
        with pytest.raises(SystemExit) as exit_info:
            run()

    assert exit_info.value.code == 2
