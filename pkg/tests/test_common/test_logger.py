import os

import pytest

from diracflow.common import Logger
from diracflow.common.logger import CSVLogger, get_logger_by_name


def test_loggers(tmp_path):
    logger = Logger(str(tmp_path), formats=["csv", "stdout"], name="observers", header="config-hash: abc")
    logger.write({"t": 0.0, "tr_M": 4.0}, log_key="t")
    logger.write({"t": 0.5, "tr_M": 1.5}, log_key="t")
    logger.close()

    with open(os.path.join(str(tmp_path), "observers.csv")) as file:
        lines = file.read().splitlines()
    assert lines[0] == "# config-hash: abc"
    assert lines[1] == "t,tr_M"
    assert lines[2] == "0.0,4.0"
    assert lines[3] == "0.5,1.5"
    assert os.path.exists(os.path.join(str(tmp_path), "observers.log"))


def test_tensorboard_logger(tmp_path):
    pytest.importorskip("torch.utils.tensorboard")
    logger = Logger(str(tmp_path), formats=["tensorboard"], name="observers")
    logger.write({"t": 0.25, "norm_d": 1.0}, log_key="t")
    logger.close()
    assert os.path.isdir(os.path.join(str(tmp_path), "observers"))


def test_csv_rejects_new_keys(tmp_path):
    writer = CSVLogger(str(tmp_path), name="series")
    writer.write({"t": 0.0, "a": 1.0})
    with pytest.raises(ValueError):
        writer.write({"t": 1.0, "b": 1.0})
    writer.close()


def test_unknown_format():
    with pytest.raises(NotImplementedError):
        get_logger_by_name("parquet")
