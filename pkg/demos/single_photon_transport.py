"""Single-photon transmission through one emitter: the chirality fingerprint.

A non-chiral emitter reflects a resonant photon perfectly (|t| = 0 at
resonance), which is what lets a photon get trapped between two of them.  A
fully chiral emitter cannot reflect at all: |t| = 1 with only a phase, so no
standing wave ever forms.  With external loss the emitter absorbs instead,
and |t|^2 + |r|^2 dips below one.
"""

import os

import numpy as np

from chiralwg.core import QubitParams, SystemConfig
from chiralwg.scattering import spectrum_to_csv, transmission_spectrum

OUT = os.path.join(os.path.dirname(__file__), "output")


def single_emitter(gamma_r, gamma_l, gamma_loss=0.0):
    return SystemConfig(
        qubit1=QubitParams(omega=1.0, gamma_r=gamma_r, gamma_l=gamma_l,
                           gamma_loss=gamma_loss, position=0.0),
        qubit2=QubitParams(omega=1.0, gamma_r=0.0, gamma_l=0.0, position=1.0))


CASES = {
    "nonchiral": single_emitter(0.005, 0.005),
    "chiral": single_emitter(0.01, 0.0),
    "lossy": single_emitter(0.005, 0.005, gamma_loss=0.002),
}


def main():
    os.makedirs(OUT, exist_ok=True)
    energies = np.linspace(0.95, 1.05, 801)
    spectra = {}
    for label, config in CASES.items():
        spectrum = transmission_spectrum(config, energies)
        spectra[label] = spectrum
        path = os.path.join(OUT, f"spectrum_{label}.csv")
        with open(path, "w") as stream:
            spectrum_to_csv(spectrum, stream, config)
        idx = energies.size // 2
        print(f"{label:9s}: |t(res)| = {abs(spectrum.t_plus[idx]):.3e}, "
              f"max flux deficit = {spectrum.flux_deficit('+').max():.3e} "
              f"-> {path}")

    try:
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, spectrum in spectra.items():
        ax.plot(energies, np.abs(spectrum.t_plus) ** 2, label=label)
    ax.set_xlabel("photon energy / omega0")
    ax.set_ylabel("|t|^2")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "transport.png"), dpi=150)
    print(f"figure -> {os.path.join(OUT, 'transport.png')}")


if __name__ == "__main__":
    main()
