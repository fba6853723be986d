import json
from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from services.base import BaseService
from shared.exceptions import InternalError, NoSpeech
from utils.logger import LogHandler, Logger
from utils.seeding import derive_seed, make_rng


class DummyService(BaseService):
    def __init__(self):
        super().__init__("DummyService")


def test_derive_seed_is_stable_and_label_sensitive():
    assert derive_seed(1234, "ga") == derive_seed(1234, "ga")
    assert derive_seed(1234, "ga") != derive_seed(1234, "lbg")
    assert derive_seed(1234, "hmm", "spk01") != derive_seed(1234, "hmm", "spk02")
    assert derive_seed(1234, "ga") != derive_seed(1235, "ga")
    assert 0 <= derive_seed(0) < 2 ** 64


def test_make_rng_streams_repeat():
    assert np.array_equal(make_rng(7, "pool").random(5), make_rng(7, "pool").random(5))


def test_log_handler_is_a_singleton():
    assert LogHandler() is LogHandler()


def test_logger_writes_json_records():
    logger = Logger("test_utils")
    with patch.object(logger, "logger") as sink:
        logger.info("Condition scored", {"rate": 80.0, "frames": np.int64(3)})

    record = json.loads(sink.info.call_args[0][0])
    assert record["message"] == "Condition scored"
    assert record["message_json"] == {"rate": 80.0, "frames": "3"}
    assert "pid" in record


def test_logger_warning_without_fields_and_with_paths(tmp_path):
    logger = Logger("test_utils")
    with patch.object(logger, "logger") as sink:
        logger.warning("Mixture clipped")
        logger.debug("File written", {"path": tmp_path / "system.json"})

    assert json.loads(sink.warning.call_args[0][0])["message_json"] == {}
    assert json.loads(sink.debug.call_args[0][0])["message_json"] == {"path": str(tmp_path / "system.json")}


def test_set_level_rejects_unknown_names():
    with pytest.raises(ValueError):
        LogHandler().set_level("chatty")
    LogHandler().set_level("INFO")


def test_operation_logs_start_and_completion():
    service = DummyService()
    service.logger = MagicMock()

    with service.operation("enrollment", {"method": "mfcc"}):
        pass

    messages = [call.args[0] for call in service.logger.info.call_args_list]
    assert messages == ["Starting enrollment", "enrollment completed successfully"]


def test_operation_passes_pipeline_errors_through():
    service = DummyService()
    service.logger = MagicMock()

    with pytest.raises(NoSpeech):
        with service.operation("extraction"):
            raise NoSpeech("nothing above threshold")
    service.logger.error.assert_called_once()


def test_operation_wraps_unexpected_errors():
    service = DummyService()
    service.logger = MagicMock()

    with pytest.raises(InternalError) as error:
        with service.operation("extraction"):
            raise KeyError("boom")

    assert isinstance(error.value.__cause__, KeyError)
    assert error.value.one_line().startswith('error=InternalError module=core message="extraction:')
