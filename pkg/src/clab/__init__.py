"""Binary differential equations of line congruences."""

__version__ = "0.1.0"
