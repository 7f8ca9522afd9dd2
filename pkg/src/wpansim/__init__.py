"""Discrete-event simulator and closed-form model of the non-beacon
IEEE 802.15.4 MAC (unslotted CSMA/CA) in a star topology."""

__version__ = "0.1.0"
