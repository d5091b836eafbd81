"""
Reading and writing the result files: the campaign results JSON and the CSV tables (CDFs,
density sweep, antenna pattern and per-trial dumps). Every float is written with 9
significant digits, CSVs use a header row, commas and LF line endings.
"""

import json
import math
from pathlib import Path

import pandas as pd

from mmshare.exceptions import OutputExists

SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.9g"


def round_sig(value, digits=9):
    """Round a float to ``digits`` significant digits, leaving nan and inf untouched."""
    value = float(value)
    if not math.isfinite(value):
        return value
    return float(f"{value:.{digits}g}")


def check_outputs_free(paths, force=False):
    """
    Refuse to go on if any of the target files already exists.

    Parameters
    ----------
    paths : iterable of str or Path
        Files about to be written.
    force : bool
        Allow overwriting. Default False.

    Raises
    ------
    OutputExists
        If a file exists and ``force`` is False. Nothing is written in that case.
    """
    if force:
        return
    existing = [str(p) for p in paths if Path(p).exists()]
    if existing:
        raise OutputExists(
            f"Refusing to overwrite existing result file(s): {', '.join(existing)}. "
            "Use --force to overwrite."
        )


def write_results_json(summary, path):
    """Write a campaign summary (see ``CampaignResult.summary``) as sorted, indented JSON."""
    text = json.dumps(summary, sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def read_results(path):
    """Read a results JSON back into the dict that ``CampaignResult.summary`` returns."""
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def write_csv(df, path):
    """Write a dataframe with the package-wide CSV conventions."""
    df.to_csv(
        path,
        index=False,
        float_format=FLOAT_FORMAT,
        lineterminator="\n",
        encoding="utf-8",
    )


def write_cdf_csv(cdf, path):
    """Write an empirical CDF given as a list of (value, probability) pairs."""
    df = pd.DataFrame(cdf, columns=["throughput_bps", "cdf"], dtype=float)
    write_csv(df, path)
