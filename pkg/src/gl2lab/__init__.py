"""gl2lab: exact computation with open subgroups of GL(2, Zhat).

Subgroups are handled at finite level as subgroups of GL(2, Z/NZ); the
package computes levels, indices, genera and admissibility of the associated
modular curves, products across coprime levels, low-index subgroup lattices,
elliptic-curve arithmetic over Q, and a classifier for "curious" groups.
"""

__version__ = "0.1.0"
