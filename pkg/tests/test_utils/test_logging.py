import os
from unittest.mock import Mock, patch

import pytest
from lightning.pytorch.loggers import CSVLogger

from mmshare.utils import logging_utils
from mmshare.utils.logging_utils import (
    close_logger,
    get_file_suffix_from_dict,
    needs_logger,
    set_logger,
)


def test_get_file_suffix_from_dict():
    extra_name_string, extra_tags = get_file_suffix_from_dict({"density": "75", "trials": 100})

    assert extra_name_string == "_density_75_trials_100"
    assert extra_tags == ["density_75", "trials_100"]


def test_get_file_suffix_from_none():
    assert get_file_suffix_from_dict(None) == ("", [])


@pytest.mark.parametrize(
    "output_paths, wandb_logging, expected",
    [
        (None, False, False),
        ({}, False, False),
        ({"logs": "runs"}, False, True),
        (None, True, True),
    ],
)
def test_needs_logger(output_paths, wandb_logging, expected):
    assert needs_logger(output_paths, wandb_logging) == expected


def test_set_logger_csv(tmp_path):
    logger = set_logger(run_name="campaign",
                        project_name=None,
                        output_paths={"logs": str(tmp_path)},
                        extra_log_string_dict={"density": "50"})

    assert isinstance(logger, CSVLogger)
    assert logger.version == "campaign_density_50"
    assert os.path.normpath(logger.log_dir) == os.path.normpath(
        os.path.join(str(tmp_path), "campaign_density_50")
    )


def test_set_logger_csv_needs_a_log_directory():
    with pytest.raises(ValueError, match="logs"):
        set_logger(run_name="campaign", project_name=None, output_paths={})


def test_set_logger_wandb():
    with patch.object(logging_utils, "WandbLogger") as wandb_logger, \
            patch("os.getcwd", return_value="/mocked/path"):
        logger = set_logger(run_name="campaign",
                            project_name="sharing-2026",
                            output_paths=None,
                            extra_log_string_dict={"density": "100"},
                            wandb_logging=True)

    wandb_logger.assert_called_once_with(
        save_dir="/mocked/path/logs",
        project="sharing-2026",
        name="campaign_density_100",
        tags=["campaign", "density_100"],
        group="campaign",
        reinit=True,
    )
    assert logger is wandb_logger.return_value
    logger.experiment.config.__setitem__.assert_called_once_with("density", "100")


def test_set_logger_wandb_default_project():
    with patch.object(logging_utils, "WandbLogger") as wandb_logger:
        set_logger(run_name="campaign", project_name=None, output_paths=None,
                   wandb_logging=True)
    assert wandb_logger.call_args.kwargs["project"] == "mmshare"


def test_close_logger():
    logger = Mock()
    with patch.object(logging_utils.wandb, "finish") as finish:
        close_logger(logger, wandb_logging=False)
        logger.save.assert_called_once()
        finish.assert_not_called()

        close_logger(logger, wandb_logging=True)
        finish.assert_called_once()


def test_csv_logger_writes_metrics(tmp_path):
    logger = set_logger(run_name="campaign", project_name=None,
                        output_paths={"logs": str(tmp_path)})
    logger.log_metrics({"baseline_sinr": 1.5e8}, step=0)
    logger.log_metrics({"baseline_sinr": 2.5e8}, step=1)
    close_logger(logger)

    assert os.path.exists(tmp_path / "campaign" / "metrics.csv")
