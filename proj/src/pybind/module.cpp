#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "codimcat/birgeom.hpp"
#include "codimcat/session.hpp"

namespace py = pybind11;
using namespace codimcat;

namespace {

// pybind cannot hold shared_ptr-to-const, so rings go through a handle
struct RingHandle {
  RingPtr ptr;
};

Poly as_poly(const RingPtr& r, const py::object& obj) {
  if (py::isinstance<Poly>(obj)) return obj.cast<Poly>();
  if (py::isinstance<py::str>(obj)) return parse_poly_text(r, obj.cast<std::string>());
  if (py::isinstance<py::int_>(obj)) return Poly::constant(r, obj.cast<std::int64_t>());
  throw py::type_error("expected a polynomial, string or integer");
}

std::vector<Poly> as_polys(const RingPtr& r, const py::iterable& it) {
  std::vector<Poly> out;
  for (py::handle h : it) out.push_back(as_poly(r, py::reinterpret_borrow<py::object>(h)));
  return out;
}

PolyMatrix rows_to_matrix(const RingPtr& r, const py::iterable& rows) {
  std::vector<std::vector<Poly>> parsed;
  for (py::handle row : rows) {
    std::vector<Poly> entries;
    for (py::handle e : row.cast<py::iterable>())
      entries.push_back(as_poly(r, py::reinterpret_borrow<py::object>(e)));
    parsed.push_back(std::move(entries));
  }
  return PolyMatrix::from_rows(r, parsed);
}

}  // namespace

PYBIND11_MODULE(_codimcat, m) {
  m.doc() = "quotient categories of coherent modules on affine charts";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError,
                      (std::string("[") + e.code() + "] " + e.what()).c_str());
    }
  });

  py::class_<RingHandle>(m, "Ring")
      .def(py::init([](std::uint32_t p, const std::vector<std::string>& vars,
                       const std::string& order) {
             auto ord = order_from_name(order);
             if (!ord) throw py::value_error("unknown order '" + order + "'");
             return RingHandle{PolyRing::make(p, vars, *ord)};
           }),
           py::arg("p"), py::arg("vars"), py::arg("order") = "grevlex")
      .def_property_readonly("p", [](const RingHandle& r) { return r.ptr->modulus(); })
      .def_property_readonly("vars", [](const RingHandle& r) { return r.ptr->vars(); })
      .def("poly", [](const RingHandle& r, const py::object& o) { return as_poly(r.ptr, o); })
      .def("__repr__", [](const RingHandle& r) {
        std::string s = "Ring(p=" + std::to_string(r.ptr->modulus()) + ", vars=[";
        for (std::size_t i = 0; i < r.ptr->nvars(); ++i) s += (i ? ", " : "") + r.ptr->vars()[i];
        return s + "], order=" + order_name(r.ptr->order()) + ")";
      });

  py::class_<Poly>(m, "Poly")
      .def("__str__", [](const Poly& f) { return to_string(f); })
      .def("__repr__", [](const Poly& f) { return "Poly(" + to_string(f) + ")"; })
      .def("__add__", &poly_add)
      .def("__sub__", &poly_sub)
      .def("__mul__", &poly_mul)
      .def("__neg__", &poly_neg)
      .def("__eq__", [](const Poly& a, const Poly& b) { return a == b; })
      .def_property_readonly("is_zero", &Poly::is_zero)
      .def_property_readonly("degree", &Poly::degree);

  py::class_<Ideal>(m, "Ideal")
      .def(py::init([](const RingHandle& r, const py::iterable& gens) {
             return Ideal(r.ptr, as_polys(r.ptr, gens));
           }),
           py::arg("ring"), py::arg("gens"))
      .def_property_readonly("gens", &Ideal::gens)
      .def("groebner", [](const Ideal& I) { return I.groebner(); })
      .def("dim", &krull_dim)
      .def("contains", [](const Ideal& I, const py::object& f) {
        return in_ideal(as_poly(I.ring(), f), I);
      })
      .def("radical_contains", [](const Ideal& I, const py::object& f) {
        return radical_member(as_poly(I.ring(), f), I);
      })
      .def("colon", &ideal_colon)
      .def("intersect", &ideal_intersect)
      .def("saturate", [](const Ideal& I, const Ideal& J) {
        auto s = saturate(I, J);
        return py::make_tuple(s.ideal, s.exponent);
      })
      .def("eliminate", [](const Ideal& I, const std::vector<std::string>& vars) {
        std::vector<std::size_t> idx;
        for (const auto& v : vars) {
          auto i = I.ring()->var_index(v);
          if (!i) throw py::value_error("unknown variable '" + v + "'");
          idx.push_back(*i);
        }
        return eliminate(I, idx);
      })
      .def("__eq__", &ideal_equal)
      .def("__repr__", [](const Ideal& I) { return "Ideal" + I.render(); });

  py::class_<AffineAlgebra>(m, "Algebra")
      .def(py::init([](const RingHandle& r, const py::iterable& gens) {
             return make_affine_algebra(r.ptr, Ideal(r.ptr, as_polys(r.ptr, gens)));
           }),
           py::arg("ring"), py::arg("defining"))
      .def_property_readonly("ring", [](const AffineAlgebra& a) { return RingHandle{a.ring}; })
      .def_property_readonly("defining", [](const AffineAlgebra& a) { return a.defining; })
      .def("dim", &chart_dim);

  py::class_<FPModule>(m, "Module")
      .def_property_readonly("rank", &FPModule::rank)
      .def("dim", &module_dim)
      .def("annihilator", &annihilator)
      .def("fitting", &fitting_ideal, py::arg("i"))
      .def("ext", &ext_module, py::arg("i"))
      .def("is_zero", &module_is_zero)
      .def("vs_dimension",
           [](const FPModule& M) -> py::object {
             auto d = vs_dimension(M);
             if (!d) return py::none();
             return py::int_(*d);
           })
      .def("torsion_part", [](const FPModule& M, int d) { return torsion_part(M, d); },
           py::arg("d"))
      .def("trim", [](const FPModule& M) { return trim(M).module; })
      .def("__repr__", [](const FPModule& M) { return "Module(" + M.render() + ")"; })
      .def("render", &FPModule::render);

  m.def(
      "module",
      [](const AffineAlgebra& alg, const py::iterable& rows) {
        PolyMatrix pm = rows_to_matrix(alg.ring, rows);
        return chart_module(alg, pm.rows(), pm.columns());
      },
      py::arg("algebra"), py::arg("presentation_rows"),
      "module presented by rows of its relation matrix");
  m.def("free_module",
        [](const AffineAlgebra& alg, std::size_t n) { return chart_module(alg, n, {}); });
  m.def("cyclic_module", [](const AffineAlgebra& alg, const Ideal& I) {
    return chart_cyclic(alg, I);
  });

  py::class_<SubmoduleResult>(m, "Submodule")
      .def_property_readonly("module", [](const SubmoduleResult& s) { return s.module; })
      .def_property_readonly("inclusion", [](const SubmoduleResult& s) { return s.inclusion; });

  py::class_<ModuleMap>(m, "Map")
      .def_property_readonly("source", [](const ModuleMap& f) { return f.source; })
      .def_property_readonly("target", [](const ModuleMap& f) { return f.target; })
      .def_property_readonly("well_defined", [](const ModuleMap& f) { return f.welldef_cert; })
      .def("kernel", [](const ModuleMap& f) { return kernel(f); })
      .def("cokernel", &cokernel)
      .def("image", [](const ModuleMap& f) { return image(f).module; })
      .def("is_iso", &is_iso)
      .def("compose", [](const ModuleMap& g, const ModuleMap& f) { return compose(g, f); });

  m.def(
      "module_map",
      [](const FPModule& M, const FPModule& N, const py::iterable& rows) {
        return make_map(M, N, rows_to_matrix(M.ring() ? M.ring() : N.ring(), rows));
      },
      py::arg("source"), py::arg("target"), py::arg("rows"));
  m.def("identity_map", &identity_map);
  m.def("hom_basis", [](const FPModule& M, const FPModule& N) {
    return hom_module(M, N).gen_maps;
  });
  m.def("direct_sum", &direct_sum);
  m.def("tensor", &tensor_product);

  py::class_<QuotientLevel>(m, "Level")
      .def(py::init(&make_level), py::arg("chart"), py::arg("k"))
      .def_property_readonly("k", [](const QuotientLevel& l) { return l.k; });
  m.def("codim_to_k", &codim_to_k);

  m.def("is_small", &is_small);
  m.def("is_weak_equivalence", &is_weak_equivalence);
  m.def("is_zero_in_quotient", &is_zero_in_quotient);

  py::class_<Roof>(m, "Roof")
      .def_property_readonly("apex", [](const Roof& r) { return r.apex; });
  m.def("roof", &roof_make, py::arg("level"), py::arg("s"), py::arg("t"));
  m.def("roof_identity", &roof_identity);
  m.def("roof_compose", &roof_compose);
  m.def("roof_equal", &roof_equal);
  m.def("roof_is_iso", &roof_is_iso);
  m.def("roof_is_zero", &roof_is_zero);

  py::class_<PrimeWitness>(m, "PrimeWitness")
      .def_property_readonly("ideal", [](const PrimeWitness& p) { return p.ideal; })
      .def_property_readonly("dim", [](const PrimeWitness& p) { return p.dim; });
  m.def("prime_witness", &prime_witness, py::arg("ideal"), py::arg("seed") = 0xC0D1CA7ull,
        py::arg("probes") = 32);

  m.def("is_minimal", &is_minimal);
  m.def("supp_k", [](const FPModule& M, const QuotientLevel& lvl) {
    py::list out;
    for (const auto& s : supp_k(M, lvl)) out.append(py::make_tuple(s.dim, s.component));
    return out;
  });
  m.def("roof_fraction", [](const QuotientLevel& lvl, const PrimeWitness& P, const py::object& a,
                            const py::object& b) {
    return roof_fraction(lvl, P, as_poly(lvl.chart.ring, a), as_poly(lvl.chart.ring, b));
  });
  m.def("pic_member", &pic_member, py::arg("L"), py::arg("level"),
        py::arg("seed") = 0xC0D1CA7ull);
  m.def("fiber_rank_locus", &fiber_rank_locus);
  m.def("hom_quotient_sections",
        [](const FPModule& F, const FPModule& G, const QuotientLevel& lvl, const Ideal& J,
           int n_max) {
          HomSections h = hom_quotient_sections(F, G, lvl, J, n_max);
          return py::make_tuple(h.sections, h.stabilized, h.n_stop);
        },
        py::arg("F"), py::arg("G"), py::arg("level"), py::arg("J"), py::arg("n_max") = 4);
  m.def("stalk_zero_test", &stalk_zero_test);
  m.def("ideal_power_filtration", &ideal_power_filtration);

  py::class_<IsoWitness>(m, "Witness")
      .def_property_readonly("certified", [](const IsoWitness& w) { return w.certified; })
      .def_property_readonly("reason", [](const IsoWitness& w) { return w.reason; })
      .def_property_readonly("s", [](const IsoWitness& w) { return w.locA.inverted; })
      .def_property_readonly("t", [](const IsoWitness& w) { return w.locB.inverted; })
      .def_property_readonly("backward", [](const IsoWitness& w) { return w.backward; })
      .def_property_readonly("bad_dims", [](const IsoWitness& w) {
        return py::make_tuple(w.bad_dim_A, w.bad_dim_B);
      });
  m.def(
      "extend_local_iso",
      [](const AffineAlgebra& A, const AffineAlgebra& B, const py::iterable& images,
         const PrimeWitness& P, const PrimeWitness& Q, std::uint64_t seed) {
        std::vector<Fraction> fr;
        for (py::handle h : images) {
          auto pair = h.cast<py::tuple>();
          fr.push_back({as_poly(A.ring, pair[0]), as_poly(A.ring, pair[1])});
        }
        return extend_local_iso(A, B, fr, P, Q, seed);
      },
      py::arg("A"), py::arg("B"), py::arg("images"), py::arg("P"), py::arg("Q"),
      py::arg("seed") = 0xC0D1CA7ull);
  m.def("identity_witness", &identity_witness);
  m.def("reverse_witness", &reverse_witness);
  m.def("localize_witness", &localize_witness);
  m.def("witness_compose", &witness_compose);
  m.def("verify_iso_witness", [](const IsoWitness& w, int k) {
    auto v = verify_iso_witness(w, k);
    return py::make_tuple(v.ok, v.reason);
  });
  m.def("transport_module", &transport_module);
  m.def("transport_map", &transport_map);
  m.def("transport_chart", &transport_chart);

  py::class_<AutoEq>(m, "AutoEq");
  m.def(
      "autoeq",
      [](const IsoWitness& w, const py::iterable& line_gens, int k, std::uint64_t seed) {
        return autoeq_make(w, as_polys(w.A.ring, line_gens), k, seed);
      },
      py::arg("witness"), py::arg("line_gens"), py::arg("k"), py::arg("seed") = 0xC0D1CA7ull);
  m.def("autoeq_apply", &autoeq_apply);
  m.def("autoeq_compose", &autoeq_compose);

  m.def(
      "run_session",
      [](const std::string& text, bool timing, int jobs, std::uint64_t seed) {
        RunConfig cfg;
        cfg.timing = timing;
        cfg.jobs = jobs;
        cfg.seed = seed;
        return run_session_text(text, cfg);
      },
      py::arg("text"), py::arg("timing") = false, py::arg("jobs") = 1,
      py::arg("seed") = 0xC0D1CA7ull);
  m.def("check_report", [](bool timing) {
    RunConfig cfg;
    cfg.timing = timing;
    return check_report(cfg);
  }, py::arg("timing") = false);
}
