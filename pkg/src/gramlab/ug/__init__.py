from gramlab.ug.grammar import (
    CHANNELIZED,
    CHANNELS,
    CONFIGS,
    MERGED,
    ChannelConfig,
    LexEntry,
    Push,
    Rule,
    UGGrammar,
    UnknownTokenError,
    enable_possessive_percolation,
    expand_subcat_schema,
    make_category,
    make_entry,
    make_rule,
)
from gramlab.ug.oracle import generate_sentences, oracle_parse
from gramlab.ug.parser import (
    Arc,
    PTrace,
    PTree,
    PWord,
    UGParse,
    arcs_cross,
    check_ncd,
    crossing_pairs,
    extract_bindings,
    propose_trace,
    ug_parse,
)

__all__ = [
    "CHANNELIZED",
    "CHANNELS",
    "CONFIGS",
    "MERGED",
    "Arc",
    "ChannelConfig",
    "LexEntry",
    "PTrace",
    "PTree",
    "PWord",
    "Push",
    "Rule",
    "UGGrammar",
    "UGParse",
    "UnknownTokenError",
    "arcs_cross",
    "check_ncd",
    "crossing_pairs",
    "enable_possessive_percolation",
    "expand_subcat_schema",
    "extract_bindings",
    "generate_sentences",
    "make_category",
    "make_entry",
    "make_rule",
    "oracle_parse",
    "propose_trace",
    "ug_parse",
]
