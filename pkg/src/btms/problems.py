"""Transcribed surrogate models of the twelve BTMS design problems.

Each objective body is written as polynomial text over ``x1..xn`` with the
printed coefficients converted to plain decimal literals. Printed outer
transforms (``100 - (...)``, ``1e4 - (...)``, ``1e-8 * (...)``,
``300 - (...)``) are applied with polynomial arithmetic so the stored
coefficients stay traceable to the printed ones.
"""

from __future__ import annotations

import math

from .polynomial import Polynomial, parse_poly

INF = math.inf

# (symbol, description, units, lower, upper)
_VARS = {
    "BTMS-1": [
        ("x1", "m_dot: flow rate", "kg/s", 0.0249, 0.0498),
        ("x2", "Q: average heat generation", "W", 5.0, 65.0),
        ("x3", "T_in: inlet temperature", "degC", 20.0, 30.0),
    ],
    "BTMS-2": [
        ("x1", "X_x: battery spacing in X direction", "mm", 20.0, 28.0),
        ("x2", "Hm: height of the MHPA", "mm", 30.0, 60.0),
        ("x3", "Wm: aluminum conduction element thickness", "mm", 2.0, 6.0),
        ("x4", "v: coolant flow velocity", "m/s", 0.02, 0.06),
    ],
    "BTMS-3": [
        ("x1", "epsilon: porosity", "%", 30.0, 70.0),
        ("x2", "alpha: channel angle", "deg", 40.0, 60.0),
        ("x3", "H: channel wall thickness", "mm", 0.6, 1.0),
        ("x4", "F_in: inlet mass flow rate", "g/s", 0.2, 1.0),
    ],
    "BTMS-4": [
        ("x1", "w: channel width", "mm", 3.0, 5.0),
        ("x2", "a: distance between branches", "mm", 10.0, 16.0),
        ("x3", "n: number of crossovers in branches", "-", 5.0, 15.0),
        ("x4", "d: channel depth", "mm", 3.0, 5.0),
        ("x5", "Q: coolant flow rate", "l/min", 0.1, 1.1),
    ],
    "BTMS-5": [
        ("x1", "d: PCM thickness", "mm", 3.0, 4.0),
        ("x2", "V_inlet: inlet air velocity", "m/s", 0.5, 4.0),
        ("x3", "T_inlet: inlet air temperature", "K", 290.15, 300.15),
    ],
    "BTMS-6": [
        ("x1", "L: spoiler length", "mm", 5.0, 10.0),
        ("x2", "X: spoiler mounting position", "mm", 11.66, 16.0),
        ("x3", "v: coolant inlet flow velocity", "m/s", 0.01, 0.05),
    ],
    "BTMS-7": [
        ("x1", "w_p: width of parallel channel", "mm", 15.0, 25.0),
        ("x2", "w_m: width of manifold channel", "mm", 20.0, 40.0),
        ("x3", "h_p: height of parallel channel", "mm", 3.0, 5.0),
        ("x4", "v: inlet velocity", "m/s", 1.0, 2.0),
    ],
    "BTMS-8": [
        ("x1", "M: mass flow rate", "g/s", 0.8, 2.0),
        ("x2", "S: channel spacing", "mm", 3.0, 5.0),
        ("x3", "W: channel width", "mm", 1.5, 3.0),
        ("x4", "alpha: channel angle", "deg", 75.0, 90.0),
    ],
    "BTMS-9": [
        ("x1", "Re: Reynolds number", "-", 50.0, 150.0),
        ("x2", "w_h: heat dissipation weighting coefficient", "-", 0.0, 1.0),
        ("x3", "w_u: thermal uniformity weighting coefficient", "-", 0.0, 1.0),
    ],
    "BTMS-10": [
        ("x1", "r_co: thermal column radius", "mm", 1.0, 5.0),
        ("x2", "t_sp: heat spreading plate thickness", "mm", 0.2, 2.0),
        ("x3", "s_b: battery spacing", "mm", 2.0, 6.0),
        ("x4", "h_co: thermal column height", "mm", 45.0, 55.0),
    ],
    "BTMS-11": [
        ("x1", "W_m: MHPA thickness", "mm", 2.0, 4.0),
        ("x2", "X_x: battery spacing in X direction", "mm", 20.0, 28.0),
        ("x3", "Y_y: battery spacing in Y direction", "mm", 23.0, 29.0),
        ("x4", "H_m: MHPA height", "mm", 30.0, 60.0),
    ],
    "BTMS-12": [
        ("x1", "d: separator width", "mm", 0.0, 20.0),
        ("x2", "l: separator length", "mm", 35.0, 50.0),
        ("x3", "d_alpha: common difference coefficient of channel spacing", "-", 0.0, 0.3),
        ("x4", "V: coolant flow rate", "L/min", 0.8, 1.6),
    ],
}

TITLES = {
    "BTMS-1": "Serpentine Channel Liquid Cooling",
    "BTMS-2": "U-Shaped Micro Heat Pipe Array",
    "BTMS-3": "Dual-Bionic Cold Plate Structure",
    "BTMS-4": "Mini-Channel Cold Plate Optimization",
    "BTMS-5": "Hybrid Air-PCM-Fin Thermal Management",
    "BTMS-6": "Tesla Valve with Spoiler",
    "BTMS-7": "Hybrid Manifold Channel Liquid Cooling",
    "BTMS-8": "Bionic Lotus Leaf Channel",
    "BTMS-9": "Topology-Optimized Liquid Cooling Plate",
    "BTMS-10": "Lightweight Hybrid PCM-Liquid Cooling",
    "BTMS-11": "MHPA-PCM-Liquid Triple Hybrid",
    "BTMS-12": "Passive Flow Regulation",
}

CITATIONS = {
    "BTMS-1": "Energies 15(23):9180 (2022), serpentine-channel liquid cold plate",
    "BTMS-2": "Zeng et al., Applied Thermal Engineering 119171 (2022)",
    "BTMS-3": "An et al., Journal of Energy Storage 111541 (2024)",
    "BTMS-4": "Kalkan et al., Energy 123949 (2022)",
    "BTMS-5": "Kosari et al., Journal of Energy Storage 114392 (2024)",
    "BTMS-6": "Peng et al., Applied Thermal Engineering 124974 (2025)",
    "BTMS-7": "Sui et al., Applied Thermal Engineering 123766 (2024)",
    "BTMS-8": "Dong et al., Energy 134226 (2025)",
    "BTMS-9": "Lin et al., Journal of Energy Storage 119440 (2025)",
    "BTMS-10": "Wu et al., Applied Thermal Engineering 120495 (2020)",
    "BTMS-11": "Xie et al., Applied Thermal Engineering 121341 (2023)",
    "BTMS-12": "Shi et al., Energy 135331 (2025)",
}

# objective name, units, printed sense, body text
_OBJ = {
    "BTMS-1": [
        ("T_ave", "degC", "minimize",
         "0.12313 - 0.1399*x1 + 0.9503*x2 + 0.9936*x3 - 94.9058*x1*x2 + 0.1523*x1*x3"
         " + 1.6680e-6*x2*x3 - 177.3068*x1^2 + 4.8611e-7*x2^2 - 0.0026*x1*x2*x3"
         " + 2379.7945*x1^2*x2 + 3.4104*x1^2*x3"),
        ("dT_max", "degC", "minimize",
         "0.0451 + 46.8433*x1 + 0.9258*x2 - 0.0036*x3 - 88.6916*x1*x2 - 1.7198*x1*x3"
         " + 0.0007*x2*x3 - 1947.0156*x1^2 + 1.1638e-6*x2^2 + 0.000013*x3^2"
         " - 0.0271*x1*x2*x3 + 2190.9304*x1^2*x2 + 74.0804*x1^2*x3 - 0.00006*x1*x2^2"),
        ("dP", "Pa", "minimize",
         "17.6338 + 10927.0303*x1 - 0.4822*x3 - 116.4686*x1*x3 + 1865850*x1^2"),
    ],
    "BTMS-2": [
        ("T_max", "degC", "minimize",
         "81.01683 - 0.866333*x1 - 0.480056*x2 - 3.91737*x3 - 198.02083*x4"
         " + 0.002183*x1*x2 + 0.009344*x1*x3 + 1.21563*x1*x4 + 0.0179*x2*x3"
         " - 0.391667*x2*x4 - 4.98750*x3*x4 + 0.011359*x1^2"
         " + 0.002449*x2^2 + 0.225781*x3^2 + 1499.0625*x4^2"),
        ("dT", "degC", "minimize",
         "27.31163 - 0.838542*x1 - 0.291767*x2 - 2.11342*x3 + 90.08333*x4"
         " + 0.002429*x1*x2 + 0.016469*x1*x3 + 0.140625*x1*x4 + 0.007333*x2*x3"
         " - 0.183333*x2*x4 - 1.94375*x3*x4 + 0.011346*x1^2 + 0.001407*x2^2"
         " + 0.108792*x3^2 - 701.45833*x4^2"),
        ("M", "kg", "minimize",
         "0.569838 - 0.006269*x1 - 0.001207*x2 - 0.019008*x3 - 0.001125*x4"
         " + 0.000154*x1*x2 + 0.00145*x1*x3 + 0.000031*x1*x4 + 0.000451*x2*x3"
         " + 0.000033*x2*x4 - 0.00025*x3*x4 + 7.70833e-6*x1^2 + 2.37037e-7*x2^2"
         " - 0.001966*x3^2 - 0.004167*x4^2"),
    ],
    "BTMS-3": [
        ("T_max", "degC", "minimize",
         "46.61549 - 0.008793*x1 + 0.032083*x2 + 0.425*x3 - 3.08296*x4"
         " + 0.063125*x1*x3 - 0.06875*x2*x3 - 1.96875*x3*x4 - 0.000272*x1^2"
         " + 2.28962*x4^2"),
        ("dT", "degC", "minimize",
         "0.879167 + 0.013625*x1 + 0.16333*x2 + 5.53333*x3 + 1.48542*x4"
         " - 0.013125*x1*x4 - 0.045*x2*x4 - 3.125*x3^2 + 0.46875*x4^2"),
        ("dP", "Pa", "minimize",
         "729.38807 + 0.3385*x2 - 1845.5756*x3 - 460.48423*x4"
         " + 724.5625*x3*x4 + 1124.54464*x3^2 + 48.57366*x4^2"),
    ],
    "BTMS-4": [
        ("dP", "Pa", "minimize",
         "1279 + 86*x1 - 443*x3 + 18*x4 + 9223*x5 + 21.98*x3^2 + 3887*x5^2"
         " - 314*x1*x5 + 92.8*x3*x5 - 566*x4*x5"),
        ("MBT", "degC", "minimize",
         "52.096 - 0.463*x1 - 0.1498*x2 - 0.1197*x3 - 0.699*x4 - 4.432*x5"
         " + 1.481*x5^2 + 0.1150*x1*x4 + 0.01050*x2*x3 + 0.1033*x2*x5 - 0.0835*x3*x5"),
        ("MTD", "degC", "minimize",
         "14.156 - 0.2739*x1 + 0.1121*x2 - 0.2305*x3 - 0.715*x4 + 0.091*x5"
         " - 0.00823*x2^2 + 0.007437*x3^2 + 0.0559*x4^2 - 0.8563*x5^2 + 0.06875*x1*x4"
         " + 0.007500*x2*x3 + 0.08333*x2*x5 - 0.06650*x3*x5 - 0.0425*x4*x5"),
    ],
    "BTMS-5": [
        ("T_max", "K", "minimize",
         "4613.36904 + 209.50266*x1 - 3.50839*x2 - 31.98168*x3"
         " + 0.361111*x1*x2 - 0.768056*x1*x3 + 0.006746*x2*x3"
         " + 1.99043*x1^2 + 0.017178*x2^2 + 0.059304*x3^2"),
        ("dT_max", "K", "minimize",
         "-1833.39075 - 52.36404*x1 - 6.27092*x2 + 13.31269*x3"
         " - 0.253968*x1*x2 + 0.141667*x1*x3 + 0.024603*x2*x3"
         " + 1.51903*x1^2 - 0.009875*x2^2 - 0.02381*x3^2"),
    ],
    "BTMS-6": [
        ("T_max", "degC", "minimize",
         "1.90626712e-4*x1^2 - 1.28889451e-3*x1*x2 - 1.15404771e-1*x1*x3"
         " + 3.13023994e-4*x2^2 + 8.56036434e-2*x2*x3 + 1.22088957e3*x3^2"
         " + 8.59696045e-3*x1 - 3.94856494e-4*x2 - 1.155495e2*x3 + 32.2404955"),
        ("Nu", "-", "minimize",
         "-7.90143347e-3*x1^2 + 2.35570426e-2*x1*x2 + 6.37633777e-2*x1*x3"
         " + 4.92003546e-3*x2^2 - 5.68830689e-1*x2*x3 - 1.28949816e4*x3^2"
         " - 3.19586641e-1*x1 - 3.38066679e-1*x2 + 1.30319958e3*x3 + 60.5388827"),
    ],
    "BTMS-7": [
        ("dP", "Pa", "minimize",
         "72.10229 + 167.072*x1 - 54.5517*x2 - 596.305*x3 + 1387.328*x4"
         " + 1.45317*x1*x2 - 12.3493*x1*x3 - 20.6411*x1*x4 + 7.50918*x2*x3"
         " - 44.9616*x2*x4 + 98.18287*x3*x4 - 3.84157*x1^2 + 0.460898*x2^2"
         " + 75.53877*x3^2 + 1631.449*x4^2"),
        ("dT_cells", "degC", "minimize",
         "24.85276 - 0.40694*x1 - 0.0449*x2 - 0.35387*x3 - 5.48901*x4"
         " + 0.000356*x1*x2 + 0.005188*x1*x3 + 0.002925*x1*x4 + 0.003644*x2*x3"
         " + 0.014112*x2*x4 - 0.00963*x3*x4 + 0.009482*x1^2 + 0.000145*x2^2"
         " + 0.006044*x3^2 + 0.956175*x4^2"),
    ],
    "BTMS-8": [
        ("dT_max", "degC", "minimize",
         "3.51 - 1.536*x1 + 0.062*x2 + 0.174*x3 - 0.0180*x4"
         " + 0.3677*x1^2 - 0.01724*x2^2 - 0.0278*x3^2 + 0.000069*x4^2"
         " + 0.00597*x1*x2 + 0.0049*x1*x3 - 0.00250*x1*x4"
         " + 0.00365*x2*x3 + 0.000716*x2*x4 - 0.00087*x3*x4"),
        ("h", "W/(m^2 degC)", "minimize",
         "4940 - 4048*x1 - 70*x2 - 1367*x3 - 14*x4 + 760*x1^2"
         " + 76*x2^2 + 267*x3^2 - 0.11*x4^2 - 71*x1*x2 + 303*x1*x3"
         " + 46.8*x1*x4 - 65.0*x2*x3 - 3.91*x2*x4 + 0.3*x3*x4"),
        ("dP", "Pa", "minimize",
         "27083 + 5034*x1 - 817*x2 - 6319*x3 - 460*x4"
         " + 923*x1^2 + 69*x2^2 + 2017*x3^2 + 3.00*x4^2 - 48*x1*x2"
         " - 2805*x1*x3 + 26.4*x1*x4 + 31*x2*x3 + 1.6*x2*x4"
         " - 21.3*x3*x4"),
    ],
    "BTMS-9": [
        ("1e4 - Q_h", "W/m", "minimize", None),
        ("T_uni", "K^2", "minimize",
         "0.532 + 0.032*x1 - 1.786*x2 - 3.846*x3 - 0.008*x1*x2"
         " - 0.024*x1*x3 + 2.365*x2*x3 - 4.06e-5*x1^2 + 1.849*x2^2 + 3.524*x3^2"),
        ("Q_f", "W/m", "minimize", None),
    ],
    "BTMS-10": [
        ("T_max", "degC", "minimize",
         "71.3037 - 3.9144*x1 - 1.6696*x2 - 0.6683*x3 - 0.4216*x4"
         " - 0.0499*x1*x2 + 0.0706*x1*x3 + 0.0405*x1*x4 - 0.0255*x2*x3"
         " + 0.0162*x2*x4 + 0.0017*x3*x4 + 0.0888*x1^2 + 0.3451*x2^2"
         " + 0.0337*x3^2 + 0.0018*x4^2"),
        ("dT", "degC", "minimize",
         "39.3227 - 2.8721*x1 - 0.7085*x2 - 0.5715*x3 - 1.1052*x4"
         " + 0.0289*x1*x2 + 0.0185*x1*x3 + 0.0271*x1*x4 + 0.0106*x2*x4"
         " + 0.2723*x1^2 + 0.0535*x3^2 + 0.0095*x4^2"),
        ("m_ts", "g", "minimize",
         "49.0164 - 10.2271*x1 + 0.6715*x2 + 1.6666*x3 - 0.0715*x4"
         " + 0.1196*x1*x2 + 0.1486*x1*x3 + 0.2467*x1*x4 + 0.6145*x2*x3"
         " + 0.1989*x3*x4 + 1.7310*x1^2 + 0.3715*x3^2"),
    ],
    "BTMS-11": [
        ("dT", "degC", "minimize",
         "-2.43064 + 0.243045*x1 + 0.677324*x2 + 0.737592*x3 - 0.18472*x4"
         " - 0.02606*x1*x2 + 0.022396*x1*x3 + 0.004529*x1*x4 - 0.02294*x2*x3"
         " + 0.00055*x2*x4 + 0.004813*x3*x4 - 0.11394*x1^2 - 0.00341*x2^2"
         " - 0.01697*x3^2 + 0.000302*x4^2"),
        ("T_max", "degC", "minimize",
         "96.58241 + 0.1578*x1 - 1.25045*x2 - 2.3343*x3 - 0.12563*x4"
         " - 0.07581*x1*x2 + 0.049944*x1*x3 - 0.00313*x1*x4 + 0.027531*x2*x3"
         " - 0.00033*x2*x4 + 0.005656*x3*x4 + 0.028913*x1^2 + 0.011411*x2^2"
         " + 0.017132*x3^2 - 0.00048*x4^2"),
        ("300 - ED", "Wh/kg", "maximize", None),
    ],
    "BTMS-12": [
        ("T_max", "degC", "minimize",
         "59.83219 + 0.12937*x1 - 0.98175*x2 - 13.24975*x3 - 7.77460*x4"
         " - 0.00427*x1*x2 + 0.28775*x1*x3 - 0.06762*x1*x4 - 0.06180*x2*x3"
         " - 0.00740*x2*x4 + 3.93312*x3*x4 + 0.00630*x1^2 + 0.013343*x2^2"
         " + 12.80125*x3^2 + 2.46094*x4^2"),
        ("dT", "degC", "minimize",
         "20.98648 + 0.18112*x1 - 0.55020*x2 - 2.53808*x3 - 6.25006*x4"
         " - 0.00439*x1*x2 + 0.10915*x1*x3 - 0.027650*x1*x4 - 0.19525*x2*x3"
         " + 0.026362*x2*x4 + 1.37000*x3*x4 + 0.00245*x1^2 + 0.00796*x2^2"
         " + 1.83333*x3^2 + 1.60591*x4^2"),
    ],
}

# inner bodies of objectives printed under an outer transform
_BTMS3_ETA = (
    "65.20346 + 0.179833*x1 + 0.719974*x2 - 25.15833*x3"
    " - 0.0022*x1*x2 + 0.1275*x1*x3 + 0.285*x2*x3 - 0.008856*x2^2"
)
_BTMS9_QH = (
    "-33.674 + 16.72*x1 + 334.241*x2 + 178.136*x3 + 7.145*x1*x2"
    " - 2.523*x1*x3 + 409.709*x2*x3 - 0.007*x1^2 - 565.378*x2^2 - 395.916*x3^2"
)
# the printed "3.8013*x1*x2*x4" term is kept apart; see ANOMALOUS_TERM
_BTMS9_QF = (
    "-68.397 + 0.784*x1 + 107.989*x2 + 1037.04*x3"
    " - 1.435*x1*x2 - 6.57*x1*x3 - 1762.27*x2*x3 - 0.001*x1^2"
    " - 115.21*x2^2 - 2301.1*x3^2 + 0.003*x1^2*x2"
    " + 0.019*x1^2*x3 + 2.681*x1*x2^2 + 6.498*x1*x3^2 + 831.428*x2^2*x3"
    " + 2481.38*x2*x3^2 + 1304.18*x3^3"
)
ANOMALOUS_TERM = "3.8013*x1*x2*x3"
_BTMS11_ED = (
    "277.272 - 0.51318*x1 - 2.63203*x2 - 2.6598*x3 - 0.50029*x4"
    " - 0.00716*x1*x2 + 0.056038*x1*x3 - 0.0782*x1*x4 - 0.01772*x2*x3"
    " + 0.001278*x2*x4 + 0.008648*x3*x4 + 0.046377*x1^2 + 0.024511*x2^2"
    " + 0.017802*x3^2 + 0.001049*x4^2"
)
_BTMS8_G1 = (
    "47.3 - 9.970*x1 + 0.322*x2 + 0.545*x3 - 0.113*x4"
    " + 2.343*x1^2 - 0.0772*x2^2 - 0.106*x3^2 + 0.00042*x4^2"
    " + 0.0514*x1*x2 + 0.0932*x1*x3 - 0.00697*x1*x4"
    " + 0.0136*x2*x3 + 0.00219*x2*x4 - 0.00327*x3*x4"
)


def variable_rows(pid: str) -> list[tuple[str, str, str, float, float]]:
    return list(_VARS[pid])


def _names(pid: str) -> list[str]:
    return [v[0] for v in _VARS[pid]]


def objective_rows(pid: str, strict_paper: bool = False) -> list[tuple[str, str, str, Polynomial]]:
    """``(name, units, printed_sense, body)`` per objective of problem ``pid``."""
    names = _names(pid)
    n = len(names)
    rows = []
    for name, units, sense, text in _OBJ[pid]:
        if text is not None:
            rows.append((name, units, sense, parse_poly(text, names)))
    if pid == "BTMS-3":
        rows.append(("100 - eta", "%", "minimize", 100.0 - parse_poly(_BTMS3_ETA, names)))
    elif pid == "BTMS-9":
        q_f = parse_poly(_BTMS9_QF, names)
        if not strict_paper:
            q_f = q_f + parse_poly(ANOMALOUS_TERM, names)
        name, units, sense, _ = _OBJ[pid][0]
        rows.insert(0, (name, units, sense, 1e4 - parse_poly(_BTMS9_QH, names)))
        name, units, sense, _ = _OBJ[pid][2]
        rows.append((name, units, sense, 1e-8 * q_f))
    elif pid == "BTMS-11":
        name, units, sense, _ = _OBJ[pid][2]
        rows.append((name, units, sense, 300.0 - parse_poly(_BTMS11_ED, names)))
    assert all(r[3].n_vars == n for r in rows)
    return rows


# label, polynomial text or objective index, lower, upper
def constraint_rows(pid: str) -> list[tuple[str, Polynomial | int, float, float]]:
    names = _names(pid)
    if pid == "BTMS-8":
        return [("g1 = T_max <= 30.895", parse_poly(_BTMS8_G1, names), -INF, 30.895)]
    if pid == "BTMS-9":
        return [("x2 + x3 <= 1", parse_poly("x2 + x3", names), -INF, 1.0)]
    if pid == "BTMS-10":
        return [
            ("f1 >= 35", 0, 35.0, INF),
            ("f1 <= 50", 0, -INF, 50.0),
            ("f2 >= 0", 1, 0.0, INF),
            ("f2 <= 5", 1, -INF, 5.0),
            ("f3 >= 0", 2, 0.0, INF),
            ("f3 <= 150", 2, -INF, 150.0),
        ]
    if pid == "BTMS-12":
        return [
            ("f1 >= 25", 0, 25.0, INF),
            ("f1 <= 40", 0, -INF, 40.0),
            ("f2 >= 0", 1, 0.0, INF),
            ("f2 <= 8.5", 1, -INF, 8.5),
        ]
    return []


PROBLEM_IDS = tuple(f"BTMS-{k}" for k in range(1, 13))
