from rlemkit.elements import Rsm


def m0():
    """The three-state worked example machine."""
    return Rsm(("q1", "q2", "q3"), ("a1", "a2"), ("b1", "b2"), {
        ("q1", "a1"): ("q2", "b1"), ("q1", "a2"): ("q3", "b2"),
        ("q2", "a1"): ("q2", "b2"), ("q2", "a2"): ("q1", "b1"),
        ("q3", "a1"): ("q1", "b2"), ("q3", "a2"): ("q3", "b1"),
    })


def random_circuit(rng, n_elements, k_choices=(2, 3, 4)):
    """A random valid netlist mixing element arities."""
    from rlemkit.circuits import Element, Netlist, validate
    from rlemkit.elements import RlemId, serial_to_table

    elements = []
    for i in range(n_elements):
        k = rng.choice(k_choices)
        serial = rng.randrange(1, 24) if k == 2 else rng.randrange(1, 720)
        elements.append(Element(f"g{i}", serial_to_table(RlemId(k, serial)),
                                rng.randrange(2)))
    n_ports = rng.randrange(1, 4)
    us = [("in", f"i{x}") for x in range(n_ports)]
    vs = [("out", f"o{x}") for x in range(n_ports)]
    for e in elements:
        us += [("eout", e.ident, j) for j in range(e.n_outputs)]
        vs += [("ein", e.ident, j) for j in range(e.n_inputs)]
    rng.shuffle(vs)
    wiring = dict(zip(us, vs))
    net = Netlist(tuple(elements),
                  tuple(f"i{x}" for x in range(n_ports)),
                  tuple(f"o{x}" for x in range(n_ports)), wiring)
    assert validate(net) == []
    return net
