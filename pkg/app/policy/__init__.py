from .checkpoint import load_checkpoint, save_checkpoint
from .model import (
    DecodeMode,
    Generation,
    PolicyForward,
    PolicyParams,
    RewriterPolicy,
    ValueParams,
    init_policy,
    init_value_from_policy,
    policy_backward,
    policy_forward,
    sample_sequence,
    sequence_logprob,
    snapshot,
    step_logits,
    value_backward,
    value_forward,
)
from .network import encode
from .optim import Adam
from .vocab import Vocab

__all__ = [
    "Adam",
    "DecodeMode",
    "Generation",
    "PolicyForward",
    "PolicyParams",
    "RewriterPolicy",
    "ValueParams",
    "Vocab",
    "encode",
    "init_policy",
    "init_value_from_policy",
    "load_checkpoint",
    "policy_backward",
    "policy_forward",
    "sample_sequence",
    "save_checkpoint",
    "sequence_logprob",
    "snapshot",
    "step_logits",
    "value_backward",
    "value_forward",
]
