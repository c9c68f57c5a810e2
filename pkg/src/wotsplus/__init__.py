"""W-OTS+ one-time signatures with a simulator for their security reduction."""
from .errors import (InvalidLength, InvalidParameter, KeyAlreadyUsed, MalformedEncoding,
                     MaskRangeError)
from .hash_family import DOMAIN_TAG, FamilyKey, FamilySpec, chain, evaluate, sample_key
from .params import Params, derive_params, encode
from .wots import PublicKey, SecretKey, Signature, keygen, sign, verify

__version__ = "0.1.0"
