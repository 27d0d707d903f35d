"""
Datentypen für Strecke, Rauschen, Angriff und Beobachter
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from utils.errors import DimensionError, ValidationError

NOISE_VARIANTS = ("gaussian", "gaussian_plus_exp")
ATTACK_MODES = ("replace_output",)
REGIMES = ("nominal", "attacked")


def _matrix(value, name: str) -> np.ndarray:
    array = np.array(value, dtype=float, ndmin=2)
    if array.ndim != 2:
        raise DimensionError(f"{name} muss eine Matrix sein, Form {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} enthält NaN oder Inf")
    array.setflags(write=False)
    return array


def _vector(value, name: str) -> np.ndarray:
    array = np.array(value, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{name} enthält NaN oder Inf")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SystemModel:
    """
    Lineare zeitinvariante Strecke mit Beobachter

        x_{t+1} = A x_t + B u_t + E w_t
        y_t     = C x_t + F w_t

    Nach der Konstruktion unveränderlich und damit zwischen parallelen
    Versuchen teilbar.
    """
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    E: np.ndarray
    F: np.ndarray
    x0: Optional[np.ndarray] = None
    xhat0: Optional[np.ndarray] = None

    def __post_init__(self):
        A = _matrix(self.A, "A")
        B = _matrix(self.B, "B")
        C = _matrix(self.C, "C")
        E = _matrix(self.E, "E")
        F = _matrix(self.F, "F")

        d_x = A.shape[0]
        if A.shape[1] != d_x:
            raise DimensionError(f"A muss quadratisch sein, Form {A.shape}")
        if B.shape[0] != d_x:
            raise DimensionError(f"B braucht {d_x} Zeilen, hat {B.shape[0]}")
        if C.shape[1] != d_x:
            raise DimensionError(f"C braucht {d_x} Spalten, hat {C.shape[1]}")
        if E.shape[0] != d_x:
            raise DimensionError(f"E braucht {d_x} Zeilen, hat {E.shape[0]}")
        if F.shape[0] != C.shape[0]:
            raise DimensionError(f"F braucht {C.shape[0]} Zeilen (= d_y), hat {F.shape[0]}")
        if E.shape[1] != F.shape[1]:
            raise DimensionError(f"E und F brauchen gleich viele Spalten (d_w): {E.shape[1]} != {F.shape[1]}")

        x0 = np.zeros(d_x) if self.x0 is None else self.x0
        xhat0 = np.zeros(d_x) if self.xhat0 is None else self.xhat0
        x0 = _vector(x0, "x0")
        xhat0 = _vector(xhat0, "xhat0")
        if x0.shape[0] != d_x or xhat0.shape[0] != d_x:
            raise DimensionError(f"x0 und xhat0 brauchen Länge {d_x}")

        for name, value in (("A", A), ("B", B), ("C", C), ("E", E), ("F", F), ("x0", x0), ("xhat0", xhat0)):
            object.__setattr__(self, name, value)

    @property
    def d_x(self) -> int:
        return self.A.shape[0]

    @property
    def d_u(self) -> int:
        return self.B.shape[1]

    @property
    def d_y(self) -> int:
        return self.C.shape[0]

    @property
    def d_w(self) -> int:
        return self.E.shape[1]


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """
    Rauschverteilung: Gauß N(0, cov) oder Gauß plus Exp(rate) pro Koordinate
    """
    variant: str
    cov: np.ndarray
    rate: Optional[float] = None
    # Faktor L mit L L^T = cov, wird in __post_init__ berechnet
    factor: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.variant not in NOISE_VARIANTS:
            raise ValidationError(f"Unbekannte Rauschvariante '{self.variant}', erlaubt: {NOISE_VARIANTS}")
        cov = _matrix(self.cov, "cov")
        if cov.shape[0] != cov.shape[1]:
            raise DimensionError(f"cov muss quadratisch sein, Form {cov.shape}")
        if not np.allclose(cov, cov.T, atol=1e-12, rtol=0.0):
            raise ValidationError("cov muss symmetrisch sein")
        eigenvalues, eigenvectors = np.linalg.eigh(cov)
        scale = max(1.0, float(np.max(np.abs(eigenvalues)))) if eigenvalues.size else 1.0
        if eigenvalues.size and eigenvalues.min() < -1e-10 * scale:
            raise ValidationError(f"cov ist nicht positiv semidefinit (kleinster Eigenwert {eigenvalues.min():.3e})")

        if self.variant == "gaussian_plus_exp":
            if self.rate is None or not np.isfinite(self.rate) or self.rate <= 0:
                raise ValidationError("rate muss für gaussian_plus_exp positiv sein")
            rate = float(self.rate)
        else:
            if self.rate is not None:
                raise ValidationError("rate ist nur für gaussian_plus_exp erlaubt")
            rate = None

        factor = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
        factor.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "factor", factor)

    @property
    def dim(self) -> int:
        return self.cov.shape[0]

    @classmethod
    def gaussian(cls, cov) -> "NoiseModel":
        return cls("gaussian", cov)

    @classmethod
    def gaussian_plus_exp(cls, cov, rate: float) -> "NoiseModel":
        return cls("gaussian_plus_exp", cov, rate)


@dataclass(frozen=True, eq=False)
class AttackModel:
    """
    Täuschungsangriff v_t = Aa v_{t-1} + v̂_t, der ab t_attack die Messung ersetzt
    """
    Aa: np.ndarray
    noise: NoiseModel
    t_attack: int
    mode: str = "replace_output"

    def __post_init__(self):
        Aa = _matrix(self.Aa, "Aa")
        if Aa.shape[0] != Aa.shape[1]:
            raise DimensionError(f"Aa muss quadratisch sein, Form {Aa.shape}")
        if self.noise.dim != Aa.shape[0]:
            raise DimensionError(f"Angriffsrauschen hat Dimension {self.noise.dim}, Aa {Aa.shape[0]}")
        if int(self.t_attack) != self.t_attack or self.t_attack < 0:
            raise ValidationError(f"t_attack muss eine nichtnegative ganze Zahl sein, ist {self.t_attack}")
        if self.mode not in ATTACK_MODES:
            raise ValidationError(f"Angriffsmodus '{self.mode}' nicht unterstützt, erlaubt: {ATTACK_MODES}")
        object.__setattr__(self, "Aa", Aa)
        object.__setattr__(self, "t_attack", int(self.t_attack))

    @property
    def d_y(self) -> int:
        return self.Aa.shape[0]

    def with_start(self, t_attack: int) -> "AttackModel":
        """Kopie mit anderem Angriffszeitpunkt"""
        return AttackModel(self.Aa, self.noise, t_attack, self.mode)


@dataclass(frozen=True, eq=False)
class ObserverGain:
    """Beobachterverstärkung L (d_x × d_y)"""
    L: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L", _matrix(self.L, "L"))


@dataclass(eq=False)
class ResidualStream:
    """
    Folge von Residuen r_t (t = 0..horizon-1) mit Regime-Markierung
    """
    samples: np.ndarray  # Form (horizon, d_y)
    regime: str
    t_attack: Optional[int] = None

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float, ndmin=2)
        if samples.ndim != 2:
            raise DimensionError(f"Residuen müssen die Form (T, d_y) haben, nicht {samples.shape}")
        if self.regime not in REGIMES:
            raise ValidationError(f"Unbekanntes Regime '{self.regime}', erlaubt: {REGIMES}")
        self.samples = samples

    @property
    def horizon(self) -> int:
        return self.samples.shape[0]

    @property
    def d_y(self) -> int:
        return self.samples.shape[1]

    def row_regimes(self):
        """Regime pro Zeitschritt (vor t_attack nominal, danach attacked)"""
        labels = np.full(self.horizon, "nominal", dtype=object)
        if self.regime == "attacked" and self.t_attack is not None:
            labels[self.t_attack:] = "attacked"
        return labels


def system_from_dict(section: Dict[str, Any]) -> SystemModel:
    """Baut ein SystemModel aus dem [system]-Abschnitt einer Konfiguration"""
    try:
        return SystemModel(
            A=section["A"],
            B=section["B"],
            C=section["C"],
            E=section["E"],
            F=section["F"],
            x0=section.get("x0"),
            xhat0=section.get("xhat0"),
        )
    except KeyError as exc:
        raise ValidationError(f"[system] braucht den Schlüssel {exc.args[0]}") from exc


def noise_from_dict(section: Dict[str, Any]) -> NoiseModel:
    """Baut ein NoiseModel aus einem [noise]- oder [attack]-Abschnitt"""
    variant = section.get("variant", "gaussian")
    if "cov" not in section:
        raise ValidationError("Rauschabschnitt braucht den Schlüssel cov")
    return NoiseModel(variant, section["cov"], section.get("rate"))


def attack_from_dict(section: Dict[str, Any]) -> AttackModel:
    """Baut ein AttackModel aus dem [attack]-Abschnitt"""
    for key in ("Aa", "t_attack"):
        if key not in section:
            raise ValidationError(f"[attack] braucht den Schlüssel {key}")
    return AttackModel(
        Aa=section["Aa"],
        noise=noise_from_dict(section),
        t_attack=section["t_attack"],
        mode=section.get("mode", "replace_output"),
    )
