"""
netbalance: incentive pricing for load balancing in cellular networks.

Computes balance-optimal traffic assignments over (time, cell) slots and the
per-slot discounts that make customers produce them.
"""

__version__ = "0.1.0"
