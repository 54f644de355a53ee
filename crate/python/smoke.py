"""Smoke test for the pypbes extension module.

Build and install first:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pypbes-*.whl
"""

import json

import pypbes


def main():
    t = pypbes.Term("a ; b + b ; a")
    assert str(t) == pypbes.render("a;b+b;a")
    assert not t.has_star()

    star = pypbes.Pbes.from_term("a*b", depth=1)
    assert len(star.configurations()) == 4, star.configurations()

    tree = pypbes.Pbes.from_term("a || (b [1/5] c)")
    assert len(json.loads(tree.tree_json())["nodes"]) == 9
    assert 'label="0.8"' in tree.tree_dot()
    assert tree.confusion_free() and tree.confusion_free(static_check=True)

    inter = t.elaborate()
    conc = pypbes.Pbes.from_term("a || b")
    forward = json.loads(pypbes.simulate(inter, conc, depth=0))
    assert forward["verdict"] == "holds"
    assert pypbes.verify(json.dumps(forward["witness"]))
    backward = json.loads(pypbes.simulate(conc, inter))
    assert backward["verdict"] == "not_found_within_search_space"
    assert any(len(c) == 4 for c in backward["diagnostic"]["unmatched"])

    assert pypbes.equivalent(pypbes.Pbes.from_term("a [1/2] b"), pypbes.Pbes.from_term("b [1/2] a"))
    assert pypbes.language_leq_of(pypbes.Pbes.from_term("a;b"), conc)

    report = json.loads(pypbes.axioms(json.dumps(
        {"format": 1, "atoms": ["a", "b"], "alphas": ["1/2"], "depth": 1, "axioms": ["plus-comm", "star-unfold"]}
    )))
    assert report["pass"]

    try:
        pypbes.Term("a [1] b")
    except ValueError:
        pass
    else:
        raise AssertionError("alpha outside (0,1) must be rejected")

    print("pypbes smoke test passed")


if __name__ == "__main__":
    main()
