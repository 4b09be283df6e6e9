#include "codimcat/session.hpp"

namespace codimcat {

// Worked examples shipped with the binary; `codim-cat check` runs them and
// the committed golden file pins their reports.
const std::vector<CorpusEntry>& builtin_corpus() {
  static const std::vector<CorpusEntry> corpus = {
      {"basics", R"(# ideals, modules and verdicts on the affine plane
ring p=32003 vars=[x,y] order=grevlex
level k=1
ideal I = [x*y - 1, y^2 - 1]
gb I
dim I
ideal J = [x^2*y]
dim J
ideal Z = []
dim Z
module M = coker [[x, y]]
dim M
ann M
small M
module R = free 1
small R
map pr : R -> M = [[1]]
zero pr
map mx : R -> R = [[x]]
weq mx
suppk M
module D = coker [[x, 0], [0, x*y]]
suppk D
ann D
module L = coker [[y], [-x]]
pic L
pic M
module T = coker [[x^2]]
filtration T I=[x]
level k=2
weq mx
zero pr
)"},
      {"hartogs", R"(# sections over the punctured plane stabilize to the whole ring
ring p=32003 vars=[x,y] order=grevlex
level k=1
module R = free 1
homsec R R J=[x, y] n=4
homsec R R J=[x^2, y] n=4
module G = coker [[x, y]]
homsec R G J=[x, y] n=4
)"},
      {"line", R"(# on the affine line the tower keeps growing
ring p=32003 vars=[x] order=grevlex
level k=1
module R = free 1
homsec R R J=[x] n=4
)"},
      {"minimal", R"(# classification of minimal objects at level one
ring p=32003 vars=[x,y] order=grevlex
level k=1
module My = coker [[y]]
minimal My P=[y]
module Thick = coker [[y^2]]
minimal Thick P=[y]
module Origin = coker [[x, y]]
minimal Origin P=[y]
module Two = coker [[y, 0], [0, y]]
minimal Two P=[y]
module Mixed = coker [[y, 0, 0], [0, x, y]]
minimal Mixed P=[y]
)"},
      {"roofs", R"(# roof calculus: inclusion of the origin ideal represents the identity
ring p=32003 vars=[x,y] order=grevlex
level k=1
module R = free 1
module E = coker [[y], [-x]]
map s : E -> R = [[x, y]]
map t : E -> R = [[x, y]]
roof hart = (s, t)
map idr : R -> R = [[1]]
roof idroof = (idr, idr)
roofeq hart idroof
roofcomp hart idroof as comp
roofeq comp hart
map two : R -> R = [[2]]
roof double = (idr, two)
roofeq double idroof
roofcomp double hart as scaled
roofeq scaled double
)"},
      {"cusp", R"(# the cuspidal cubic and the line are isomorphic away from points
ring p=32003 vars=[x,y] order=grevlex
level k=1
algebra A = vars=[x,y] ideal=[y^2 - x^3]
algebra B = vars=[u] ideal=[]
witness W : A -> B = images=[y/x] P=[y^2 - x^3] Q=[]
verify W k=1
verify W k=0
module MA over A = coker [[x]]
transport W MA as MB
dim MB
module FA over A = free 1
transport W FA as FB
dim FB
)"},
      {"autoeq", R"(# coordinate swap with the origin ideal as the line class
ring p=32003 vars=[x,y] order=grevlex
level k=1
algebra A = vars=[x,y] ideal=[]
witness SW : A -> A = images=[y, x] P=[] Q=[]
verify SW k=1
autoeq E = (SW, [x, y])
module MX = coker [[x]]
autoeq E MX as N
dim N
ann N
)"},
      {"errors", R"(# engine errors become structured entries, never crashes
ring p=32003 vars=[x,y] order=grevlex
level k=1
module M = coker [[x]]
module N = coker [[x^2]]
map bad : M -> N = [[1]]
minimal M P=[x*y]
level k=5
small M
)"},
  };
  return corpus;
}

}  // namespace codimcat
