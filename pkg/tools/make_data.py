"""Regenerate data/examples.json from the named sample spaces."""

import sys

sys.path.insert(0, "src")

from schfin.etale import extend_scalars, product_cover, structure_cover  # noqa: E402
from schfin.finalg import OmegaTower, poly_algebra, prime_field  # noqa: E402
from schfin.samples import SPACES, chain_collapse, f2xf2  # noqa: E402
from schfin.serialize import Writer, to_json  # noqa: E402

tower = OmegaTower(2)
w = Writer(2)
w.add_algebra("F2", prime_field(2))
w.add_algebra("F4", tower.field(2))
w.add_algebra("F8", tower.field(3))
w.add_algebra("F2xF2", f2xf2()[0])
w.add_algebra("D", poly_algebra(2, [0, 0, 1]))
spaces = {name: make() for name, make in SPACES.items()}
collapse = chain_collapse()
spaces["chain"] = collapse.src
spaces["P"] = collapse.dst
for name in sorted(spaces):
    w.add_space(name, spaces[name])
X0 = spaces["X0"]
f4 = extend_scalars(X0, tower.field(2))
w.add_algebra_sheaf("F4_X0", f4.sheaf, "X0")
w.add_algebra_sheaf("F8_X0", extend_scalars(X0, tower.field(3)).sheaf, "X0")
w.add_algebra_sheaf("F4xF2_X0", product_cover(f4, structure_cover(X0)).cover.sheaf, "X0")
w.add_algebra_sheaf("F4_chain", extend_scalars(spaces["chain"], tower.field(2)).sheaf, "chain")
w.add_module_sheaf("O_pseudocircle", spaces["pseudocircle"].structure_sheaf(), "pseudocircle")
w.add_module_sheaf("O_Xv", spaces["Xv"].structure_sheaf(), "Xv")
w.add_morphism("collapse", collapse, "chain", "P")
open("data/examples.json", "w").write(to_json(w.document()))
