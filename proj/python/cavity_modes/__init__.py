"""Resonant eigenmodes of 3-D closed cavity resonators with anisotropic media.

Thin Python layer over the C++ core: mesh generation, edge-element
assembly, the three constrained-eigenproblem solvers, and reference
spectra for validation.
"""

from ._core import (
    SPEED_OF_LIGHT,
    AssembledSystem,
    EigenSolution,
    MaterialTensors,
    Mode,
    TetMesh,
    analytic_box_eigenvalues,
    assemble,
    check_conformity,
    count_zero_eigenvalues,
    generate_ball_mesh,
    generate_box_mesh,
    generate_cylinder_mesh,
    material_preset,
    paper_reference,
    parse_mesh,
    resonant_frequency,
    run,
    solve,
    write_mesh,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "AssembledSystem",
    "EigenSolution",
    "MaterialTensors",
    "Mode",
    "TetMesh",
    "analytic_box_eigenvalues",
    "assemble",
    "check_conformity",
    "count_zero_eigenvalues",
    "generate_ball_mesh",
    "generate_box_mesh",
    "generate_cylinder_mesh",
    "material_preset",
    "paper_reference",
    "parse_mesh",
    "resonant_frequency",
    "run",
    "solve",
    "write_mesh",
]
