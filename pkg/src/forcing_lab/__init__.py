"""Finite-scale laboratory for superconditions over forcing instances."""

from .instances import Instance, gen, load_instance, mutate_X
from .kernel import Poset, all_generic_filters, validate_poset
from .names import HFSet, PName, check_name, interpret, parse_hf
from .sigma import Strategy, Supercondition, sigma_plus

__all__ = [
    "HFSet",
    "Instance",
    "PName",
    "Poset",
    "Strategy",
    "Supercondition",
    "all_generic_filters",
    "check_name",
    "gen",
    "interpret",
    "load_instance",
    "mutate_X",
    "parse_hf",
    "sigma_plus",
    "validate_poset",
]
