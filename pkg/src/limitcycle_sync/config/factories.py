"""Domain objects built from a resolved configuration."""

from __future__ import annotations

from limitcycle_sync.config.settings import Settings
from limitcycle_sync.models import NoiseConvention, SteadyStateMethod
from limitcycle_sync.models.params import PairParams, QuarticCouplings, SingleOscillatorParams
from limitcycle_sync.models.self_energy import LorentzianGain, MarkovianPair, SelfEnergyModel, Tabulated


def single_params(settings: Settings) -> SingleOscillatorParams:
    s = settings.section("single")
    return SingleOscillatorParams(omega0=s["omega0"], gamma1=s["gamma1"], gamma2=s["gamma2"])


def pair_params(settings: Settings) -> PairParams:
    p = settings.section("pair")
    return PairParams(omega1=p["omega1"], omega2=p["omega2"], gamma1=p["gamma1"], gamma2=p["gamma2"], D=p["D"])


def self_energy_model(settings: Settings, kind: str | None = None) -> SelfEnergyModel:
    se = settings.section("self_energy")
    kind = kind or se["model"]
    if kind == "markovian":
        p = settings.section("pair")
        return MarkovianPair(gamma1=p["gamma1"], D=p["D"])
    if kind == "tabulated":
        return Tabulated.from_csv(se["file"], interpolation=se["interpolation"])
    return LorentzianGain(
        omega_ex=se["omega_ex"],
        width=se["width"],
        gain_strength=se["gain_strength"],
        background_loss=se["background_loss"],
        cross_sign=int(se["cross_sign"]),
        kappa_extra=se["kappa_extra"],
    )


def couplings_for(settings: Settings, kind: str | None = None) -> QuarticCouplings:
    """Markovian studies take gamma2 from the pair, frequency-dependent ones from self_energy."""
    kind = kind or settings.get("self_energy.model")
    if kind == "markovian":
        return QuarticCouplings.stuart_landau(settings.get("pair.gamma2"))
    return QuarticCouplings.stuart_landau(settings.get("self_energy.gamma2"))


def noise_convention(settings: Settings) -> NoiseConvention:
    return NoiseConvention.from_str(settings.get("diffusion.noise_convention"))


def steady_state_method(settings: Settings) -> SteadyStateMethod:
    return SteadyStateMethod.from_str(settings.get("lindblad.method"))
