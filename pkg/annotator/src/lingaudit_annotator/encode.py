"""Deterministic hashing encoders.

An encoder id of the form ``hashrp-<dims>`` names a random-projection
embedder: every token hashes to a 128-bit key that seeds a counter-based
generator, which draws that token's projection row.  Identical tokens
embed identically across runs and machines, sentences average their
token vectors, and everything is unit length so cosine scores stay in
[-1, 1].
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

_ENCODER_RE = re.compile(r"^hashrp-(\d{1,4})$")


class AnnotatorError(Exception):
    """A job asked for something the annotator cannot produce."""


def encoder_dims(encoder_id: str) -> int:
    match = _ENCODER_RE.match(encoder_id)
    if match is None:
        raise AnnotatorError(f"unknown encoder model {encoder_id!r}")
    dims = int(match.group(1))
    if dims == 0:
        raise AnnotatorError(f"unknown encoder model {encoder_id!r}")
    return dims


def _token_rng(encoder_id: str, token: str) -> np.random.Generator:
    material = f"{encoder_id}:{token}".encode("utf-8")
    key = int.from_bytes(hashlib.blake2b(material, digest_size=16).digest(), "little")
    return np.random.Generator(np.random.Philox(key=key))


def token_matrix(encoder_id: str, tokens: tuple[str, ...]) -> np.ndarray:
    """One unit row per token, shape (len(tokens), dims), float32."""
    dims = encoder_dims(encoder_id)
    out = np.empty((len(tokens), dims), dtype=np.float32)
    for i, tok in enumerate(tokens):
        row = _token_rng(encoder_id, tok).standard_normal(dims)
        norm = float(np.linalg.norm(row))
        out[i] = (row / norm).astype(np.float32)
    return out


def sentence_vector(encoder_id: str, tokens: tuple[str, ...]) -> np.ndarray:
    """Mean of the token rows, renormalized to unit length, float32."""
    dims = encoder_dims(encoder_id)
    if not tokens:
        return np.zeros(dims, dtype=np.float32)
    mean = token_matrix(encoder_id, tokens).astype(np.float64).mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        return np.zeros(dims, dtype=np.float32)
    return (mean / norm).astype(np.float32)
