from ivp2Tube.rhs.dynamic import dynamic_rhs_init
from ivp2Tube.rhs.expression import RhsDef, eval_box, parse
from ivp2Tube.rhs.gadget import BitStream, GadgetRef, ParallelGadget, SingleGadget
from ivp2Tube.rhs.right_hand_side import RightHandSide
