"""QC-MDPC McEliece with a laboratory of bit flipping decoders."""

from .decoder import (
    DecoderConfig,
    FixedPerIteration,
    MaxMinusDelta,
    StepFunction,
    SyndromeWeightStep,
    bit_flip_decode,
    constant_time_decode,
    default_config,
)
from .gf2_ring import NotInvertible, RingElement, SparseIndices
from .mceliece import Ciphertext, DecryptFailure, ErrorVector, decrypt, encrypt, sample_error
from .qc_mdpc import PRESETS, Params, PrivateKey, PublicKey, check_keypair, keygen

__version__ = "0.1.0"
