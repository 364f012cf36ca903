"""Closed-form arithmetic-operation and fronthaul-signalling counts.

All formulas are integer polynomials and are evaluated with Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass


class InvalidParameterError(ValueError):
    pass


class InvalidConfigurationError(ValueError):
    pass


def _mrc_poly(K: int, L: int, N: int) -> int:
    return 3 * K * L * N**2 + 2 * K**2 * L * N + K * L**2 * N**2 + 2 * K**2 * L**2 * N + 2 * K**3 * L * N


def _oslp_poly(K: int, L: int, N: int) -> int:
    return (5 * K * L * N**2 + 8 * K**2 * L * N + 2 * K * L**2 * N**2 + 2 * K**2 * L**2 * N
            + 2 * K**3 * L * N + 3 * K**2 * L)


def op_count_per_eval(strategy: str, K: int, L: int, N: int, l: int | None = None,
                      first_loop: bool = False) -> int:
    """Approximate operations for one objective evaluation.

    ``l`` (1-based AP index) is needed only for SMRC in its first loop,
    where only APs ``1..l`` contribute.
    """
    if min(K, L, N) < 1:
        raise InvalidParameterError("dimensions must be positive")
    strategy = strategy.upper()
    if strategy in ("CMRC", "PMRC"):
        return _mrc_poly(K, L, N)
    if strategy == "COSLP":
        return _oslp_poly(K, L, N)
    if strategy == "SMRC":
        if not first_loop:
            return _mrc_poly(K, L, N)
        if l is None:
            raise InvalidParameterError("SMRC first-loop count needs the AP index l")
        return _mrc_poly(K, l, N)
    raise InvalidConfigurationError(f"unknown strategy {strategy!r}")


def generation_multiplier(n_pop: int, tournament_size: int) -> int:
    """Objective evaluations' weight per generation: ``4 Np + 5 Np tk - 2 tk``."""
    return 4 * n_pop + 5 * n_pop * tournament_size - 2 * tournament_size


def total_op_count(n_iter: int, n_pop: int, tournament_size: int, per_eval: int) -> int:
    if n_iter < 1:
        raise InvalidParameterError("n_iter must be >= 1")
    return n_iter * generation_multiplier(n_pop, tournament_size) * per_eval


def cumulative_op_count(strategy: str, K: int, L: int, N: int, n_iter: int, n_pop: int,
                        tournament_size: int) -> int:
    """Total over ``n_iter`` generations, applying SMRC's cheaper first-loop branch.

    Generation ``t`` (1-based) is in the first loop when ``t < L`` and then
    optimizes AP ``l = t``.
    """
    mult = generation_multiplier(n_pop, tournament_size)
    if strategy.upper() != "SMRC":
        return total_op_count(n_iter, n_pop, tournament_size, op_count_per_eval(strategy, K, L, N))
    total = 0
    for t in range(1, n_iter + 1):
        first = t < L
        total += mult * op_count_per_eval("SMRC", K, L, N, l=t if first else None, first_loop=first)
    return total


def fronthaul_symbols(strategy: str, K: int, N: int, L: int, tau_c: int, tau_p: int) -> int:
    """Real symbols each stripe hop carries per coherence block."""
    if not tau_p < tau_c:
        raise InvalidParameterError("need tau_p < tau_c")
    payload = 2 * K * (tau_c - tau_p)
    strategy = strategy.upper()
    if strategy == "CMRC":
        return payload + K + K * N * L
    if strategy == "COSLP":
        return payload + K**2 + K * N * L
    if strategy == "SMRC":
        return payload + K + K * N
    if strategy == "PMRC":
        return payload + K
    if strategy in ("SOSLP", "POSLP"):
        raise InvalidConfigurationError("OSLP is only defined for the centralized strategy")
    raise InvalidConfigurationError(f"unknown strategy {strategy!r}")


@dataclass
class CostReport:
    strategy: str
    op_count: int
    fronthaul_symbols: int
    n_iter: int
    instrumented_macs: int = 0
    wall_clock_per_loop_s: float = 0.0


def cost_report(strategy: str, K: int, L: int, N: int, tau_c: int, tau_p: int, n_iter: int, n_pop: int,
                tournament_size: int, instrumented_macs: int = 0, wall_clock_per_loop_s: float = 0.0
                ) -> CostReport:
    return CostReport(
        strategy.upper(),
        cumulative_op_count(strategy, K, L, N, max(n_iter, 1), n_pop, tournament_size),
        fronthaul_symbols(strategy, K, N, L, tau_c, tau_p),
        n_iter,
        instrumented_macs,
        wall_clock_per_loop_s,
    )
