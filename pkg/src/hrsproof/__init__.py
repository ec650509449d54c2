"""Proof terms for orthogonal higher-order rewriting systems."""

import sys

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
