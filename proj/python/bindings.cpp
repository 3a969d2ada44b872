#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <string>
#include <vector>

#include "medbin/bin_engine.hpp"
#include "medbin/core_select.hpp"
#include "medbin/distributed.hpp"
#include "medbin/moments.hpp"
#include "medbin/updatable.hpp"

namespace py = pybind11;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

std::span<const double> view(const Array& a) {
    if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
    const std::span<const double> v{a.data(), static_cast<std::size_t>(a.size())};
    medbin::require_finite(v, "input array");
    return v;
}

std::vector<double> copy(const Array& a) {
    const auto v = view(a);
    return {v.begin(), v.end()};
}

medbin::BinParams params(std::size_t bins, std::size_t cutoff) {
    medbin::BinParams p{bins, cutoff};
    p.validate();
    return p;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Median selection by successive binning";

    static py::exception<medbin::ContractViolation> contract(m, "ContractViolation", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const medbin::ContractViolation& e) {
            py::set_error(contract, e.what());
        }
    });

    py::class_<medbin::Moments>(m, "Moments")
        .def(py::init<>())
        .def_readonly("count", &medbin::Moments::count)
        .def_readonly("sum", &medbin::Moments::sum)
        .def_readonly("sum_sq", &medbin::Moments::sum_sq)
        .def_readonly("min", &medbin::Moments::min)
        .def_readonly("max", &medbin::Moments::max)
        .def_property_readonly("mean", &medbin::Moments::mean)
        .def_property_readonly("variance", &medbin::Moments::variance)
        .def_property_readonly("sigma", &medbin::Moments::sigma)
        .def("__eq__", [](const medbin::Moments& a, const medbin::Moments& b) { return a == b; })
        .def("__repr__", [](const medbin::Moments& s) {
            return "Moments(count=" + std::to_string(s.count) + ", mean=" + std::to_string(s.mean()) +
                   ", sigma=" + std::to_string(s.sigma()) + ")";
        });

    m.def("compute_moments", [](const Array& a) { return medbin::compute_moments(view(a)); }, py::arg("data"));
    m.def("merge_moments", &medbin::merge_moments, py::arg("a"), py::arg("b"));

    m.def(
        "binmedian",
        [](const Array& a, std::size_t bins, std::size_t cutoff) {
            const auto v = view(a);
            const auto p = params(bins, cutoff);
            py::gil_scoped_release nogil;
            return medbin::binmedian(v, p);
        },
        py::arg("data"), py::arg("bins") = 1000, py::arg("cutoff") = 20);

    m.def(
        "binapprox",
        [](const Array& a, std::size_t bins) {
            const auto v = view(a);
            py::gil_scoped_release nogil;
            return medbin::binapprox(v, bins);
        },
        py::arg("data"), py::arg("bins") = 1000);

    m.def(
        "median_select",
        [](const Array& a) {
            auto v = copy(a);
            if (v.empty()) throw medbin::ContractViolation("median of an empty array");
            py::gil_scoped_release nogil;
            return medbin::median_select(v);
        },
        py::arg("data"));

    m.def(
        "sort_median",
        [](const Array& a) {
            auto v = copy(a);
            if (v.empty()) throw medbin::ContractViolation("median of an empty array");
            py::gil_scoped_release nogil;
            return medbin::sort_median(v);
        },
        py::arg("data"));

    m.def(
        "select_kth",
        [](const Array& a, std::size_t k) {
            auto v = copy(a);
            py::gil_scoped_release nogil;
            return medbin::select_kth(v, k);
        },
        py::arg("data"), py::arg("k"));

    py::class_<medbin::UpdatableMedian>(m, "UpdatableMedian")
        .def(py::init([](const Array& a, std::size_t bins, std::size_t cutoff) {
                 return medbin::UpdatableMedian(copy(a), params(bins, cutoff));
             }),
             py::arg("data"), py::arg("bins") = 1000, py::arg("cutoff") = 20)
        .def("add", [](medbin::UpdatableMedian& u, const Array& a) { u.add(view(a)); }, py::arg("points"))
        .def("remove", [](medbin::UpdatableMedian& u, const Array& a) { u.remove(view(a)); }, py::arg("points"))
        .def("query_exact", &medbin::UpdatableMedian::query_exact)
        .def("query_approx",
             [](medbin::UpdatableMedian& u) {
                 const auto r = u.query_approx();
                 return py::make_tuple(r.value, r.error_bound);
             })
        .def("__len__", &medbin::UpdatableMedian::size)
        .def_property_readonly("n0", &medbin::UpdatableMedian::n0)
        .def_property_readonly("rebuild_count", &medbin::UpdatableMedian::rebuild_count)
        .def_property_readonly("base_moments", &medbin::UpdatableMedian::base_moments);

    auto partitions = [](const std::vector<Array>& parts) {
        std::vector<medbin::Partition> out;
        out.reserve(parts.size());
        for (const auto& p : parts) out.push_back(view(p));
        return out;
    };
    m.def(
        "distributed_binapprox",
        [partitions](const std::vector<Array>& parts, std::size_t bins) {
            return medbin::distributed_binapprox(partitions(parts), bins);
        },
        py::arg("partitions"), py::arg("bins") = 1000);
    m.def(
        "distributed_binmedian",
        [partitions](const std::vector<Array>& parts, std::size_t bins, std::size_t cutoff) {
            return medbin::distributed_binmedian(partitions(parts), params(bins, cutoff));
        },
        py::arg("partitions"), py::arg("bins") = 1000, py::arg("cutoff") = 20);
}
