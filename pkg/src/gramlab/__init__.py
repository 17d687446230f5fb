"""gramlab: a desk-scale grammar workbench.

Two engines over one feature-structure substrate: a unification grammar
with subcat schemas and list-valued gap threading, and a feature-based
tree-adjoining grammar with substitution, adjunction and top/bottom
feature checking.  Bundled grammar fragments and a judgment corpus tie
the two together.
"""

__version__ = "0.1.0"
