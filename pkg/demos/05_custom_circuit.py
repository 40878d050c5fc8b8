"""Describing interferometer chains as text.

Circuits can be written in a small line-oriented format, parsed with
line-numbered diagnostics, printed back canonically, and run on any
input state. The shipped encoder/decoder files use the same format.
"""

from timebinsim import (
    CircuitTextError,
    QubitSpec,
    new_state,
    parse_circuit,
    print_circuit,
    run,
    shipped_circuit,
)

text = """
# a bare half-tick interferometer: split, flip one arm, delay the other
input a
bs a -> s l conv=symmetric
hwp s -> s
phase l -> l phi=1.5707963267948966
delay l -> l ticks=1
pbs s l -> dark bright
output bright dark
"""

circuit = parse_circuit(text)
print("canonical form:")
print(print_circuit(circuit))

out = run(circuit, new_state(QubitSpec(1, 0), "a"))
print("|H> in, state out:")
print(out.dump())

print("\nshipped encoder (first lines):")
print("\n".join(print_circuit(shipped_circuit("encoder_n1")).splitlines()[:6]))

bad = "input a\nbs a -> s l conv=sideways\noutput s l\n"
try:
    parse_circuit(bad)
except CircuitTextError as err:
    print(f"\ndiagnostics carry line numbers: {err}")
