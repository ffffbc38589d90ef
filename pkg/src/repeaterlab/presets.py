"""Named parameter sets. Values use the same section/key layout as scenario files."""

PRESETS = {
    "nv_center": {
        "source": "NV centre in a Purcell~10 cavity: P_em 5%, eps 0.2, t_c 70 us over 20 km; "
        "gamma_e set so that F0 ~ 0.97 (coherence of a few ms)",
        "generation": {
            "scheme": "resonant",
            "P_em": "0.05",
            "collection": "0.2",
            "t0": "1e-6",
            "gamma_e": "150",
        },
        # eps = 0.2 is the total efficiency, fiber included
        "link": {"L0": "20", "attenuation": "0", "t_c": "70e-6"},
        "errors": {"p": "0.99", "eta": "0.99"},
    },
    "headline_1000km": {
        "source": "1000 km estimate: 0.2 dB/km, L0 = 20 km, ideal detectors, P_em 8%, "
        "0.5% local errors, one pumping step per level",
        "generation": {
            "scheme": "resonant",
            "P_em": "0.08",
            "collection": "1.0",
            "t0": "1e-6",
            "upsilon": "0",
        },
        "link": {"L0": "20", "attenuation": "0.2"},
        "errors": {"p": "0.995", "eta": "0.995"},
        "nesting": {"M": "1", "n_total": "50"},
    },
    "fig4": {
        "source": "asymptote staircase: F0 = p = eta = 0.99, phase errors only",
        "generation": {"F0": "0.99", "T0": "1.0", "upsilon": "0"},
        "link": {"L0": "20", "attenuation": "0.2"},
        "errors": {"p": "0.99", "eta": "0.99"},
    },
    "fig5": {
        "source": "distance scaling: 3 pumping steps per level, p = eta = 0.995, phase errors only",
        "generation": {"F0": "0.99", "T0": "0.0128", "upsilon": "0"},
        "link": {"L0": "20", "attenuation": "0.2"},
        "errors": {"p": "0.995", "eta": "0.995"},
        "nesting": {"M": "3", "n_total": "1024", "distances": "2:1024:2"},
    },
    "fig6": {
        "source": "long-distance asymptote vs initial fidelity and error shape, p = eta = 0.995",
        "generation": {"F0": "0.99", "T0": "1.0", "upsilon": "0"},
        "link": {"L0": "20", "attenuation": "0.2"},
        "errors": {"p": "0.995", "eta": "0.995"},
    },
}
