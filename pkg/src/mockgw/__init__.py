"""Generating series of Vafa-Witten invariants of P^2, their log Gromov-Witten
counterparts on the mirror rational elliptic surface, and numerical checks of
their (mock) modular behaviour."""

from .qseries import QSeries
from .numtheory import ThetaSpec, eta, hurwitz, theta_qexp
from .toricgeo import ChernData, curve_class, contact_order, fiber_class
from .genseries import SeriesSpec, h_gw, h_vw, f2, extract_invariants, bps_invert

__version__ = "0.1.0"
