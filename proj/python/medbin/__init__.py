"""Median selection by successive binning."""

from ._core import (
    ContractViolation,
    Moments,
    UpdatableMedian,
    binapprox,
    binmedian,
    compute_moments,
    distributed_binapprox,
    distributed_binmedian,
    median_select,
    merge_moments,
    select_kth,
    sort_median,
)

__all__ = [
    "ContractViolation",
    "Moments",
    "UpdatableMedian",
    "binapprox",
    "binmedian",
    "compute_moments",
    "distributed_binapprox",
    "distributed_binmedian",
    "median",
    "median_select",
    "merge_moments",
    "select_kth",
    "sort_median",
]


def median(data, mode="exact-bin", bins=1000, cutoff=20):
    """Median of `data` by one of: exact-bin, exact-select, approx, sort."""
    if mode == "exact-bin":
        return binmedian(data, bins, cutoff)
    if mode == "exact-select":
        return median_select(data)
    if mode == "approx":
        return binapprox(data, bins)
    if mode == "sort":
        return sort_median(data)
    raise ValueError(f"unknown mode {mode!r}")
