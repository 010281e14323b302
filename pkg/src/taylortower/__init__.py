"""Exact functor-calculus computations in the stable model of chain complexes."""
