from .code import (
    ProtographBase,
    SparseParityCheck,
    derive_layers,
    expand_protograph,
    format_alist,
    format_protograph,
    parse_alist,
    parse_protograph,
    systematic_encoder,
)
from .decode import (
    DecodeOutcome,
    LmsBatchDecoder,
    cn_update_minsum,
    count_ops_lms,
    lms_decode,
    spa_decode,
    syndrome_ok,
)
from .ar4ja import AR4JA_RATES, ar4ja_base_matrix, build_ar4ja_protograph, has_four_cycle

__all__ = [
    "ProtographBase",
    "SparseParityCheck",
    "derive_layers",
    "expand_protograph",
    "format_alist",
    "format_protograph",
    "parse_alist",
    "parse_protograph",
    "systematic_encoder",
    "DecodeOutcome",
    "LmsBatchDecoder",
    "cn_update_minsum",
    "count_ops_lms",
    "lms_decode",
    "spa_decode",
    "syndrome_ok",
    "AR4JA_RATES",
    "ar4ja_base_matrix",
    "build_ar4ja_protograph",
    "has_four_cycle",
]
