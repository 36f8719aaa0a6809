"""
K-ary Huffman codes over block indices and their prefix-free parsing.
"""

import heapq
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy

from rdplab.source_models import Pmf
from rdplab.utils import DecodeError

__all__ = [
    "Codeword",
    "CodeTable",
    "build_huffman",
    "encode_lossless",
    "decode_lossless",
    "decode_stream",
]

Codeword = Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class CodeTable:
    """
    A prefix-free K-ary code for block indices.

    :param alphabet_size: code alphabet size K >= 2
    :param codewords: codeword (tuple of digits in 0..K-1) per coded index
    :param size: number of block indices of the generating pmf, indices
        without a codeword had probability zero
    """

    alphabet_size: int
    codewords: Dict[int, Codeword]
    size: int
    lengths: numpy.ndarray = field(init=False, repr=False)
    _lookup: Dict[Codeword, int] = field(init=False, repr=False)

    def __post_init__(self):
        if self.alphabet_size < 2:
            raise ValueError(
                f"code alphabet size must be >= 2, given {self.alphabet_size}"
            )
        if not self.codewords:
            raise ValueError("a code table needs at least one codeword")
        codewords = {
            int(idx): tuple(int(d) for d in word)
            for idx, word in self.codewords.items()
        }
        top = self.alphabet_size - 1
        for idx, word in codewords.items():
            if not 0 <= idx < self.size:
                raise ValueError(f"block index {idx} outside 0..{self.size - 1}")
            if any(not 0 <= digit <= top for digit in word):
                raise ValueError(f"codeword {word} uses digits outside 0..{top}")

        lengths = numpy.zeros(self.size, dtype=numpy.int64)
        for idx, word in codewords.items():
            lengths[idx] = len(word)
        lengths.setflags(write=False)

        object.__setattr__(self, "codewords", codewords)
        object.__setattr__(self, "lengths", lengths)
        lookup = {word: idx for idx, word in codewords.items()}
        object.__setattr__(self, "_lookup", lookup)
        if len(self._lookup) != len(codewords):
            raise ValueError("codewords must be distinct")

    @property
    def max_length(self) -> int:
        return max(len(word) for word in self.codewords.values())

    @property
    def is_degenerate(self) -> bool:
        """
        :return: True for the single-symbol table with one empty codeword
        """
        return len(self.codewords) == 1 and self.max_length == 0

    def kraft_sum(self) -> float:
        return float(
            sum(self.alphabet_size ** -len(word) for word in self.codewords.values())
        )

    def is_prefix_free(self) -> bool:
        words = sorted(self.codewords.values())
        # in sorted order a prefix sorts directly before some word it prefixes
        return all(
            words[pos + 1][: len(words[pos])] != words[pos]
            for pos in range(len(words) - 1)
        )

    def expected_length(self, p: Pmf) -> float:
        """
        :return: expected codeword length in K-ary digits under p
        """
        if len(p) != self.size:
            raise ValueError(f"pmf has {len(p)} labels, table covers {self.size}")
        uncoded = [
            idx for idx in numpy.flatnonzero(p.probs) if idx not in self.codewords
        ]
        if uncoded:
            raise ValueError(
                f"indices {uncoded} have positive probability but no codeword"
            )
        return float(p.probs @ self.lengths)

    def lookup(self, word: Codeword) -> Optional[int]:
        return self._lookup.get(word)


def build_huffman(p: Pmf, K: int = 2) -> CodeTable:
    """
    Optimal prefix-free K-ary code for the positive-probability indices of p.
    Ties are broken by probability, then by block index, with internal
    nodes ordered after leaves. Zero-probability dummies pad the leaf count
    to 1 mod (K - 1). A single coded index gets the empty codeword.

    :param p: pmf over block indices
    :param K: code alphabet size, >= 2
    :return: the code table
    """
    if K < 2:
        raise ValueError(f"code alphabet size must be >= 2, given {K}")
    coded = [int(idx) for idx in numpy.flatnonzero(p.probs > 0)]
    if not coded:
        raise ValueError("p has no symbol of positive probability")
    if len(coded) == 1:
        return CodeTable(alphabet_size=K, codewords={coded[0]: ()}, size=len(p))

    # heap entries: (probability, order, node id); leaves are ordered by
    # block index, dummies before every leaf
    heap: List[Tuple[float, int, int]] = []
    children: Dict[int, List[int]] = {}
    leaf_of: Dict[int, int] = {}
    node_id = 0
    for idx in coded:
        heap.append((float(p.probs[idx]), idx, node_id))
        leaf_of[node_id] = idx
        node_id += 1
    dummies = (-(len(coded) - 1)) % (K - 1)
    for dummy in range(dummies):
        heap.append((0.0, -1 - dummy, node_id))
        node_id += 1
    heapq.heapify(heap)

    merges = 0
    while len(heap) > 1:
        group = [heapq.heappop(heap) for _ in range(K)]
        children[node_id] = [entry[2] for entry in group]
        total = math.fsum(entry[0] for entry in group)
        heapq.heappush(heap, (total, len(p) + merges, node_id))
        node_id += 1
        merges += 1

    codewords: Dict[int, Codeword] = {}
    stack: List[Tuple[int, Codeword]] = [(heap[0][2], ())]
    while stack:
        node, prefix = stack.pop()
        if node in children:
            for digit, child in enumerate(children[node]):
                stack.append((child, prefix + (digit,)))
        elif node in leaf_of:
            codewords[leaf_of[node]] = prefix

    return CodeTable(alphabet_size=K, codewords=codewords, size=len(p))


def encode_lossless(table: CodeTable, block_index: int) -> Codeword:
    """
    :param table: the code table
    :param block_index: an index carrying a codeword
    :return: its codeword
    """
    try:
        return table.codewords[int(block_index)]
    except KeyError as err:
        raise ValueError(f"block index {block_index} has no codeword") from err


def decode_stream(
    table: CodeTable, digits: Sequence[int], count: Optional[int] = None
) -> List[int]:
    """
    Parse a concatenation of codewords

    :param table: the code table
    :param digits: K-ary digits
    :param count: number of codewords to read, required for the degenerate
        empty-codeword table and checked otherwise
    :return: the decoded block indices in order
    :raises DecodeError: on an invalid digit, an unknown or truncated
        codeword, or trailing digits
    """
    if table.is_degenerate:
        if count is None:
            raise ValueError("the empty-codeword table needs an explicit count")
        if len(digits):
            raise DecodeError("unexpected digits for an empty-codeword table", offset=0)
        return [next(iter(table.codewords))] * count

    decoded: List[int] = []
    longest = table.max_length
    start = 0
    prefix: List[int] = []
    for offset, digit in enumerate(digits):
        digit = int(digit)
        if not 0 <= digit < table.alphabet_size:
            raise DecodeError(
                f"digit {digit} is outside the code alphabet", offset=offset
            )
        if count is not None and len(decoded) == count:
            raise DecodeError(f"trailing digits after {count} codewords", offset=offset)
        prefix.append(digit)
        index = table.lookup(tuple(prefix))
        if index is not None:
            decoded.append(index)
            prefix = []
            start = offset + 1
        elif len(prefix) >= longest:
            raise DecodeError("no codeword matches", offset=start)

    if prefix:
        raise DecodeError("stream ends inside a codeword", offset=start)
    if count is not None and len(decoded) != count:
        raise DecodeError(
            f"expected {count} codewords, found {len(decoded)}", offset=len(digits)
        )
    return decoded


def decode_lossless(table: CodeTable, digits: Sequence[int]) -> int:
    """
    :param table: the code table
    :param digits: exactly one codeword
    :return: the block index it encodes
    :raises DecodeError: if digits is not exactly one codeword
    """
    return decode_stream(table, digits, count=1)[0]
