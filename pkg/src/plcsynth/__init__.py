"""Toolkit for constraint-list driven Boolean PLC blocks.

Submodules:
    blocks       domain model and scan-cycle simulator
    lang         ST / IL parsing, printing and translation
    sat          Tseitin encoding and a CDCL satisfiability solver
    constraints  constraint lists, XML persistence, spec compilation
    engine       bounded verification and the CEGIS synthesis loop
    bench        warehouse benchmark scenarios and timing statistics
    cli          command-line front end
"""

__version__ = "0.1.0"
