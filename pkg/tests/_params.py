"""Reference experiment parameters shared by the test modules."""

import math

from spdcrate.beams import BeamConfig
from spdcrate.phasematch import PolingConfig
from spdcrate.rates import SpdcConfig, SpdcType

MW = 1e-3

PPLN = dict(lambda_p=782.09e-9, d_eff=23.95e-12, L_z=40e-3, sigma_p=52.6e-6, sigma_1=55.1e-6,
            n1=2.155, n2=2.155, np=2.195, ng1=2.200, ng2=2.200, kappa=96.75e-27)
PPLN_SIGMA = dict(lambda_p=0.1e-9, d_eff=1.20e-12, L_z=0.001e-3, sigma_p=2e-6, sigma_1=2e-6,
                  n1=0.001, n2=0.001, np=0.001, ng1=0.001, ng2=0.001, kappa=0.2e-27)

BIBO = dict(lambda_p=405e-9, d_eff=3.70e-12, L_z=1e-3,
            n1=1.822, n2=1.822, np=1.822, ng1=1.866, ng2=1.866, kappa=160.9e-27)
BIBO_SIGMA = dict(lambda_p=1e-9, d_eff=0.18e-12, L_z=0.001e-3,
                  n1=0.001, n2=0.001, np=0.001, ng1=0.001, ng2=0.001, kappa=0.2e-27)

PPKTP = dict(lambda_p=773e-9, d_eff=3.18e-12, L_z=21.2e-3, sigma_p=0.875e-6, sigma_1=1.875e-6,
             n1=1.736, n2=1.783, np=1.759, ng1=1.765, ng2=1.815)
PPKTP_SIGMA = dict(lambda_p=1e-9, d_eff=0.32e-12, L_z=0.01e-3, sigma_p=0.125e-6, sigma_1=0.125e-6,
                   n1=0.002, n2=0.002, np=0.002, ng1=0.002, ng2=0.002)

# published central rates and sigmas, pairs/s/mW
R_TH = {"ppln": (94.86e6, 10.89e6), "bibo": (53.87e6, 10.87e6), "ppktp": (23.58e6, 5.60e6)}
R_EXP = {"ppln": (95.63e6, 2.71e6), "bibo": (64.68e6, 1.69e6), "ppktp": (35.5e6, 0.8e6)}

# measured counts per mW, [value, sigma]
RECORDS = {
    "ppln": dict(N1=(16.00e6, 0.21e6), N2=(17.99e6, 0.22e6), N12=(2.93e6, 0.05e6),
                 Phi1=(0.05e6, 0.0), Phi2=(0.06e6, 0.0), A12=(0.02e6, 0.0)),
    "bibo": dict(N1=(6.16e5, 0.05e5), N2=(6.02e5, 0.05e5), N12=(2.71e3, 0.06e3),
                 Phi1=(6.04e4, 0.15e4), Phi2=(6.40e4, 0.10e4), A12=(4.39, 2.79)),
    "ppktp": dict(N1=(3.71e6, 0.05e6), N2=(4.51e6, 0.05e6), N12=(4.71e5, 0.07e5)),
}

# |g|^2 and pump photon number from the depletion footnote
FOOTNOTE_G2 = 8.136e6
FOOTNOTE_NP = dict(power=1e-3, lambda_p=404e-9, L_z=3e-3, n_p=1.822)

# AlN ring example
ALN = dict(radius=30e-6, L_x=1.0e-6, L_y=0.3e-6, d_eff=4.7e-12, B=12.3, lambda_p=775e-9,
           n_g=2.19, n=2.16, n_p=2.14)


def omega(lam):
    return 2.0 * math.pi * 299792458.0 / lam


def spdc(p, spdc_type, poled, power=MW, **overrides):
    p = {**p, **overrides}
    beam = BeamConfig(lambda_p=p["lambda_p"], power=power, sigma_p=p.get("sigma_p", 1e-3),
                      sigma_1=p.get("sigma_1", 1e-3), n_p=p["np"])
    return SpdcConfig(n1=p["n1"], n2=p["n2"], np=p["np"], ng1=p["ng1"], ng2=p["ng2"], d_eff=p["d_eff"],
                      L_z=p["L_z"], beam=beam, kappa=p.get("kappa", 0.0), spdc_type=SpdcType(spdc_type),
                      poling=PolingConfig(period=1e-6 if poled else 0.0, order=1, enabled=poled))


def ppln_cfg(**kw):
    return spdc(PPLN, "type0", True, **kw)


def bibo_cfg(**kw):
    return spdc(BIBO, "type1", False, **kw)


def ppktp_cfg(**kw):
    return spdc(PPKTP, "type2", True, **kw)
