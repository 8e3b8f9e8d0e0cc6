"""Built-in example models with the published parameter sets.

Each builder returns a validated Model; keyword arguments override the
default parameters so scaled-up/scaled-down variants (different N) can be
constructed for convergence studies.  The epidemic and two-compound
autocatalytic models have no published rate values, so their defaults are
documented choices, not literature numbers.
"""
from __future__ import annotations

from .model import Model
from .parser import parse_model

BUILTIN_NAMES = ("epidemic", "abc", "crazy_clock", "crazy_clock_switch", "viral", "transcription")


def _fmt(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() and abs(v) < 1e15 else repr(float(v))


def epidemic(lam1: float = 1.0, lam2: float = 2.0, lam3: float = 1.0, n: int = 1000,
             init_s: int | None = None, init_i: int | None = None) -> Model:
    """Birth / infection / recovery model, exactly density dependent.

    Intensities: N*lam1 (birth), lam2*S*I/N (infection), lam3*I (recovery).
    Default initial state scales with N so density starts are N-independent.
    """
    init_s = init_s if init_s is not None else n // 2
    init_i = init_i if init_i is not None else n // 10
    return parse_model(f"""
model epidemic
scale N = {n}
param lam1 = {_fmt(lam1)}
param lam2 = {_fmt(lam2)}
param lam3 = {_fmt(lam3)}
species S : fluid, init {init_s}
species I : fluid, init {init_i}
reaction birth : 0 -> S @ mass_action lam1
reaction infect : S + I -> 2 I @ mass_action lam2
reaction recover : I -> 0 @ mass_action lam3
""")


def abc(nu1: float = 1.0, nu2: float = 1.0, nu3: float = 1.0, n: int = 100,
        init_a: int | None = None, init_b: int | None = None) -> Model:
    """Two-compound mass-action triple A+B -> 2A, 2A -> A+B, 2A+B -> A+B.

    The volume V plays the role of the scale N; the second and third
    reactions are only nearly density dependent (O(1/N) corrections).
    """
    init_a = init_a if init_a is not None else n
    init_b = init_b if init_b is not None else n // 2
    return parse_model(f"""
model abc
scale N = {n}
param nu1 = {_fmt(nu1)}
param nu2 = {_fmt(nu2)}
param nu3 = {_fmt(nu3)}
species A : fluid, init {init_a}
species B : fluid, init {init_b}
reaction r1 : A + B -> 2 A @ mass_action nu1
reaction r2 : 2 A -> A + B @ mass_action nu2
reaction r3 : 2 A + B -> A + B @ mass_action nu3
""")


def crazy_clock(lam1: float = 3.0, lam2: float = 6000.0, n: int = 1000) -> Model:
    """Autocatalytic A -> B, A + B -> 2 B from state (N, 0).

    Conserves A + B = N; the intensity of losing one A at level i is
    lam1*i + lam2*i*(N-i)/N, so the upper level N sticks until the first
    plain decay and the lower level 0 is absorbing.
    """
    return parse_model(f"""
model crazy_clock
scale N = {n}
param lam1 = {_fmt(lam1)}
param lam2 = {_fmt(lam2)}
species A : fluid, init {n}
species B : fluid, init 0
reaction decay : A -> B @ mass_action lam1
reaction auto : A + B -> 2 B @ mass_action lam2
""")


def crazy_clock_switch(lam1: float = 3.0, lam2: float = 3000.0, lam3: float = 500.0,
                       s_width: int = 50, n: int = 1000) -> Model:
    """Crazy clock with a one-way switch C that doubles the autocatalytic speed.

    The autocatalytic intensity is lam2*i*j/(2N) while C is present and
    lam2*i*j/N once C is gone (twice as fast with no C; lam2 names the fast
    coefficient).  The switch C -> 0 fires at rate max(0, lam3*(i-(N-S))/S),
    positive only in the top S levels.
    """
    return parse_model(f"""
model crazy_clock_switch
scale N = {n}
param lam1 = {_fmt(lam1)}
param lam2 = {_fmt(lam2)}
param lam3 = {_fmt(lam3)}
param S = {s_width}
species A : fluid, init {n}
species B : fluid, init 0
species C : discrete, init 1, bounds [0, 1]
reaction decay : A -> B @ mass_action lam1
reaction auto : A + B -> 2 B @ expr (2 - C) * lam2 * A * B / (2 * N)
reaction switch : C -> 0 @ expr max(0, lam3 * (A - (N - S)) / S)
""")


def viral(n: int = 20000) -> Model:
    """Intracellular viral kinetics; gen and tem are discrete, struct fluid.

    mu4 is the per-pair packaging constant: the table value mu4/N = 7.5e-6
    times N = 20000, giving intensity 7.5e-6 * gen * struct.
    """
    return parse_model(f"""
model viral
scale N = {n}
param mu1 = 0.025
param mu2 = 0.25
param mu3 = 1
param mu4 = {_fmt(7.5e-6 * n)}
param mu5 = 1000
param mu6 = 2
species gen : discrete, init 0
species tem : discrete, init 1
species struct : fluid, init 0
reaction k1 : gen -> tem @ mass_action mu1
reaction k2 : tem -> 0 @ mass_action mu2
reaction k3 : tem -> tem + gen @ mass_action mu3
reaction k4 : gen + struct -> 0 @ mass_action mu4
reaction k5 : tem -> tem + struct @ mass_action mu5
reaction k6 : struct -> 0 @ mass_action mu6
""")


def transcription(mu13: float = 1.0, n: int = 650) -> Model:
    """Transcription regulation with an enzymatic conversion stage.

    The published table gives mu1..mu12 only; mu13 (EM -> E + P) is exposed
    as a parameter with documented default 1.0.  Scaled constants are the
    table entries times N (or 2N for the dimerization), so the intensities
    reproduce the tabulated per-second rates at N = 650.  DNA, DNA_D and
    DNA_2D are discrete; their total is conserved at 2.
    """
    return parse_model(f"""
model transcription
scale N = {n}
param mu1 = 0.043
param mu2 = 0.0001
param mu3 = 0.72
param mu4 = 0.0039
param mu5 = {_fmt(0.014 * n)}
param mu6 = 0.48
param mu7 = {_fmt(0.00014 * n)}
param mu8 = 8.8e-12
param mu9 = {_fmt(0.029 * 2 * n)}
param mu10 = 0.5
param mu11 = {_fmt(0.001 * n)}
param mu12 = 0.0001
param mu13 = {_fmt(mu13)}
species D : fluid, init 40
species DNA : discrete, init 2
species DNA_D : discrete, init 0
species DNA_2D : discrete, init 0
species mRNA : fluid, init 0
species M : fluid, init 0
species E : fluid, init 80
species EM : fluid, init 0
species P : fluid, init 0
reaction k1 : mRNA -> mRNA + M @ mass_action mu1
reaction k2 : M -> 0 @ mass_action mu2
reaction k3 : DNA_D -> DNA_D + mRNA @ mass_action mu3
reaction k4 : mRNA -> 0 @ mass_action mu4
reaction k5 : DNA + D -> DNA_D @ mass_action mu5
reaction k6 : DNA_D -> DNA + D @ mass_action mu6
reaction k7 : DNA_D + D -> DNA_2D @ mass_action mu7
reaction k8 : DNA_2D -> DNA_D + D @ mass_action mu8
reaction k9 : 2 M -> D @ mass_action mu9
reaction k10 : D -> 2 M @ mass_action mu10
reaction k11 : E + M -> EM @ mass_action mu11
reaction k12 : EM -> E + M @ mass_action mu12
reaction k13 : EM -> E + P @ mass_action mu13
""")


_BUILDERS = {
    "epidemic": epidemic,
    "abc": abc,
    "crazy_clock": crazy_clock,
    "crazy_clock_switch": crazy_clock_switch,
    "viral": viral,
    "transcription": transcription,
}


def builtin(name: str) -> Model:
    """Construct a built-in model by name; raises KeyError for unknown names."""
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown built-in model {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
