"""
Functions for naming simulation runs and initialising the Lightning run logger (CSV or
Weights & Biases) that records per-trial metrics and campaign summaries.
"""

import os

import wandb
from lightning.pytorch.loggers import CSVLogger, WandbLogger


def get_file_suffix_from_dict(extra_log_string_dict):
    """
    Get the extra name string and tags from the extra_log_string_dict.

    Parameters
    ----------
    extra_log_string_dict : dict or None
        Extra strings to add to the run name, e.g. the swept gNB density.
        Input format {"name": "value"}. In the run name, each entry is added
        as "_name_value", and a tag "name_value" is added.

    Returns
    -------
    extra_name_string : str
        Extra name string to add to a run or file name.
    extra_tags : list
        List of extra tags to add to the logged run (wandb).
    """
    extra_name_string = ""
    extra_tags = []
    if extra_log_string_dict is not None:
        for key, value in extra_log_string_dict.items():
            extra_name_string += f"_{key}_{value}"
            extra_tags.append(f"{key}_{value}")

    return extra_name_string, extra_tags


def needs_logger(output_paths, wandb_logging):
    """Whether a run should create a logger at all."""
    return wandb_logging or (output_paths is not None and "logs" in output_paths)


def set_logger(run_name,
               project_name,
               output_paths,
               extra_log_string_dict=None,
               wandb_logging=False):
    """
    Set the logger for a simulation run. If wandb_logging is True the logger is a WandbLogger,
    otherwise it is a CSVLogger writing under output_paths["logs"].

    Parameters
    ----------
    run_name : str
        Base name of the run, e.g. "campaign".
    project_name : str or None
        Name of the wandb project. If None, the project name is set to "mmshare".
    output_paths : dict or None
        Dictionary of output paths. Must hold "logs" when wandb_logging is False.
    extra_log_string_dict : dict
        Extra strings to add to the run name and tags. Default None.
    wandb_logging : bool
        Whether to use wandb logging. Default False.

    Returns
    -------
    logger : lightning.pytorch.loggers.Logger
        WandbLogger or CSVLogger.

    Raises
    ------
    ValueError
        If CSV logging is requested without a "logs" output path.
    """
    extra_name_string, extra_tags = get_file_suffix_from_dict(extra_log_string_dict)
    name = f"{run_name}{extra_name_string}"
    tags = [run_name] + extra_tags

    if wandb_logging:
        if project_name is None:
            project_name = "mmshare"

        logger = WandbLogger(
            save_dir=os.getcwd() + "/logs",
            project=project_name,
            name=name,
            tags=tags,
            group=run_name,
            reinit=True,
        )
        if extra_log_string_dict is not None:
            for key, value in extra_log_string_dict.items():
                logger.experiment.config[key] = value

    else:
        if output_paths is None or "logs" not in output_paths:
            raise ValueError(
                "CSV logging needs a 'logs' entry in output_paths, e.g. {'logs': 'runs/logs'}."
            )
        logger = CSVLogger(
            save_dir=output_paths["logs"],
            name="",
            version=name,
        )

    return logger


def close_logger(logger, wandb_logging=False):
    """Flush the logger to disk and end the wandb run if one was started."""
    logger.save()
    if wandb_logging:
        wandb.finish()
