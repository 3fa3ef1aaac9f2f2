"""Kripke structures, LTSs, state sets and the pre/post transformers."""

from .kripke import (
    STATE_ATOM,
    KripkeStructure,
    LabelledTS,
    LabelMode,
    StateSet,
    initial_partition,
    label_classes,
    lts_to_kripke,
    post,
    post_mask,
    pre,
    pre_mask,
)

__all__ = [
    "STATE_ATOM",
    "KripkeStructure",
    "LabelledTS",
    "LabelMode",
    "StateSet",
    "initial_partition",
    "label_classes",
    "lts_to_kripke",
    "post",
    "post_mask",
    "pre",
    "pre_mask",
]
