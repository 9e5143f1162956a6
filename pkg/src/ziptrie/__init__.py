"""String dictionaries with LCP-aware comparisons: zip-tries and string B-trees."""

from .bookend import BookendState, CompareOutcome, Side, advance_state, k_compare
from .lcp_codec import APPROX, EXACT, CodecConfig, LcpMode, LcpValue
from .ledger import CostLedger
from .oracle import LinearOracle, OracleDict, ancestor_audit, naive_lcp
from .packed_key import BYTES, DNA, Alphabet, EncodingError, PackedKey, key_compare, lcp_from, pack, unpack
from .parallel_lcp import ChunkSchedule, Policy, k_compare_chunked, msw_sqrt, pem_lcp
from .string_btree import BuildError, StringBTree, branch, naive_branch, range_tree_eliminate
from .zip_trie import TrieConfig, ZipNode, ZipTrie

__all__ = [
    "APPROX", "BYTES", "DNA", "EXACT",
    "Alphabet", "BookendState", "BuildError", "ChunkSchedule", "CodecConfig", "CompareOutcome",
    "CostLedger", "EncodingError", "LcpMode", "LcpValue", "LinearOracle", "OracleDict",
    "PackedKey", "Policy", "Side", "StringBTree", "TrieConfig", "ZipNode", "ZipTrie",
    "advance_state", "ancestor_audit", "branch", "k_compare", "k_compare_chunked", "key_compare",
    "lcp_from", "msw_sqrt", "naive_branch", "naive_lcp", "pack", "pem_lcp", "range_tree_eliminate",
    "unpack",
]
