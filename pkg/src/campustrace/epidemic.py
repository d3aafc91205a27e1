"""Compartmental outbreak models (SIR / SEIR) with a mobility-restriction control.

States are population fractions (s, e, i, r) summing to one. The control
parameter mu in [0, 1] scales down the transmission term: mu = 0 is no
intervention, mu = 1 is perfect isolation of infectious individuals
(the susceptible fraction then never moves). Integration is classical
fixed-step fourth-order Runge-Kutta, which keeps runs reproducible and
conserves s+e+i+r to well below 1e-9 over epidemic horizons.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

MODEL_KINDS = ("SIR", "SEIR")


@dataclass(frozen=True)
class EpidemicParams:
    beta: float  # transmission rate, 1/day
    alpha: float  # progression rate out of the exposed state, 1/day
    gamma: float  # recovery rate, 1/day
    mu: float = 0.0
    population_n: int = 50
    model_kind: str = "SEIR"

    def __post_init__(self):
        for name in ("beta", "alpha", "gamma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must be within [0, 1], got {self.mu}")
        if self.population_n < 1:
            raise ValueError(f"population_n must be >= 1, got {self.population_n}")
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"model_kind must be one of {MODEL_KINDS}, got {self.model_kind!r}")


@dataclass(frozen=True)
class EpidemicState:
    s: float
    e: float
    i: float
    r: float
    t: float = 0.0

    def __post_init__(self):
        # tolerance admits the harmless sub-1e-12 negatives of clip-free
        # integration without accepting genuinely bad states
        for name in "seir":
            v = getattr(self, name)
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValueError(f"{name} must be a fraction in [0, 1], got {v}")
        if abs(self.s + self.e + self.i + self.r - 1.0) > 1e-9:
            raise ValueError(f"fractions must sum to 1, got {self.s + self.e + self.i + self.r!r}")


@dataclass(frozen=True)
class SeriesSummary:
    peak_i: float
    peak_time_days: float
    final_r: float


@dataclass
class EpidemicSeries:
    params: EpidemicParams
    dt_days: float
    output_stride: int
    states: list[EpidemicState]
    summary: SeriesSummary


def derivatives(state: EpidemicState, params: EpidemicParams) -> tuple[float, float, float, float]:
    """(ds/dt, de/dt, di/dt, dr/dt) at the given state.

    Written as inter-compartment flows so the four components cancel
    pairwise: what leaves one compartment enters the next.
    """
    return _derivs(state.s, state.e, state.i, params)


def _derivs(s: float, e: float, i: float, params: EpidemicParams) -> tuple[float, float, float, float]:
    f_infect = (1.0 - params.mu) * params.beta * s * i
    f_recover = params.gamma * i
    if params.model_kind == "SIR":
        return (-f_infect, 0.0, f_infect - f_recover, f_recover)
    f_progress = params.alpha * e
    return (-f_infect, f_infect - f_progress, f_progress - f_recover, f_recover)


def simulate(
    params: EpidemicParams,
    initial_state: EpidemicState,
    t_end_days: float,
    dt_days: float = 0.1,
    output_stride: int = 1,
) -> EpidemicSeries:
    """Integrate with fixed-step RK4, recording every ``output_stride`` steps.

    The summary (peak infectious fraction, its time, final recovered
    fraction) is taken over the dense trajectory, not just the recorded
    states.
    """
    if dt_days <= 0:
        raise ValueError(f"dt_days must be positive, got {dt_days}")
    if output_stride < 1:
        raise ValueError(f"output_stride must be >= 1, got {output_stride}")
    # construction re-validates the fraction invariants
    s, e, i, r = initial_state.s, initial_state.e, initial_state.i, initial_state.r
    _ = EpidemicState(s, e, i, r)

    n_steps = max(0, round(t_end_days / dt_days))
    states = [EpidemicState(s, e, i, r, t=0.0)]
    peak_i, peak_t = i, 0.0
    for step in range(1, n_steps + 1):
        k1 = _derivs(s, e, i, params)
        k2 = _derivs(s + 0.5 * dt_days * k1[0], e + 0.5 * dt_days * k1[1], i + 0.5 * dt_days * k1[2], params)
        k3 = _derivs(s + 0.5 * dt_days * k2[0], e + 0.5 * dt_days * k2[1], i + 0.5 * dt_days * k2[2], params)
        k4 = _derivs(s + dt_days * k3[0], e + dt_days * k3[1], i + dt_days * k3[2], params)
        h6 = dt_days / 6.0
        s += h6 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        e += h6 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        i += h6 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        r += h6 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        t = step * dt_days
        if i > peak_i:
            peak_i, peak_t = i, t
        if step % output_stride == 0:
            states.append(EpidemicState(s, e, i, r, t=t))
    return EpidemicSeries(
        params=params,
        dt_days=dt_days,
        output_stride=output_stride,
        states=states,
        summary=SeriesSummary(peak_i=peak_i, peak_time_days=peak_t, final_r=r),
    )


@dataclass(frozen=True)
class MuSummary:
    mu: float
    peak_i: float
    peak_time_days: float
    final_r: float


def mu_sweep(
    params: EpidemicParams,
    initial_state: EpidemicState,
    mu_values: list[float],
    t_end_days: float = 180.0,
    dt_days: float = 0.1,
) -> list[MuSummary]:
    """One outbreak summary per control value; order-independent results."""
    for mu in mu_values:
        if not 0.0 <= mu <= 1.0:
            raise ValueError(f"mu must be within [0, 1], got {mu}")
    out = []
    for mu in mu_values:
        series = simulate(replace(params, mu=mu), initial_state, t_end_days, dt_days, output_stride=10)
        out.append(
            MuSummary(
                mu=mu,
                peak_i=series.summary.peak_i,
                peak_time_days=series.summary.peak_time_days,
                final_r=series.summary.final_r,
            )
        )
    return out
