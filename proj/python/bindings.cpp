#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <string>

#include "pestego/carrier_io.hpp"
#include "pestego/crc32.hpp"
#include "pestego/error.hpp"
#include "pestego/integrity.hpp"
#include "pestego/key.hpp"
#include "pestego/normal.hpp"
#include "pestego/pe_format.hpp"
#include "pestego/stat_stego.hpp"
#include "pestego/stego_pe.hpp"

namespace py = pybind11;
using namespace pestego;

namespace {

Bytes to_vec(const py::bytes& b) {
  const std::string_view s = b;
  return Bytes(s.begin(), s.end());
}

py::bytes to_py(ByteView b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

stat::StatParams params_from(std::pair<std::uint32_t, std::uint32_t> block, int k, double alpha) {
  return stat::StatParams::make(block.second, block.first, k, alpha);
}

py::list issues_to_py(const std::vector<Issue>& issues) {
  py::list out;
  for (const auto& i : issues)
    out.append(py::make_tuple(i.severity == Severity::Error ? "error" : "warning", i.code, i.message));
  return out;
}

}  // namespace

PYBIND11_MODULE(_pestego, m) {
  m.doc() = "PE header-slack payload hiding and patchwork-style statistical embedding";

  static PyObject* error_type =
      PyErr_NewException("pestego._pestego.PestegoError", PyExc_RuntimeError, nullptr);
  m.attr("PestegoError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  py::class_<Region>(m, "Region")
      .def(py::init<std::uint32_t, std::uint32_t>(), py::arg("offset"), py::arg("length"))
      .def_readonly("offset", &Region::offset)
      .def_readonly("length", &Region::length)
      .def("__eq__", [](const Region& a, const Region& b) { return a == b; })
      .def("__repr__", [](const Region& r) {
        return "Region(offset=" + std::to_string(r.offset) + ", length=" + std::to_string(r.length) + ")";
      });

  py::class_<SectionHeader>(m, "SectionHeader")
      .def_property_readonly("name", [](const SectionHeader& s) { return to_py(s.name); })
      .def_property_readonly("display_name", &SectionHeader::display_name)
      .def_readonly("virtual_size", &SectionHeader::virtual_size)
      .def_readonly("virtual_address", &SectionHeader::virtual_address)
      .def_readonly("size_of_raw_data", &SectionHeader::size_of_raw_data)
      .def_readonly("pointer_to_raw_data", &SectionHeader::pointer_to_raw_data);

  py::class_<PeImage>(m, "PeImage")
      .def_static("parse", [](const py::bytes& b, bool strict) { return PeImage::parse(to_vec(b), {strict}); },
                  py::arg("data"), py::arg("strict") = false)
      .def_property_readonly("size", &PeImage::size)
      .def_property_readonly("e_lfanew", [](const PeImage& p) { return p.dos_header().e_lfanew; })
      .def_property_readonly("machine", [](const PeImage& p) { return p.nt_headers().machine; })
      .def_property_readonly("number_of_sections", [](const PeImage& p) { return p.nt_headers().number_of_sections; })
      .def_property_readonly("image_base", [](const PeImage& p) { return p.nt_headers().image_base; })
      .def_property_readonly("file_alignment", [](const PeImage& p) { return p.nt_headers().file_alignment; })
      .def_property_readonly("size_of_headers", &PeImage::size_of_headers)
      .def_property_readonly("address_of_entry_point",
                             [](const PeImage& p) { return p.nt_headers().address_of_entry_point; })
      .def_property_readonly("checksum", [](const PeImage& p) { return p.nt_headers().checksum; })
      .def_property_readonly("header_end_offset", &PeImage::header_end_offset)
      .def_property_readonly("sections", &PeImage::sections)
      .def_property_readonly("warnings", [](const PeImage& p) { return issues_to_py(p.warnings()); })
      .def("write", [](PeImage& p, std::uint32_t off, const py::bytes& b) { p.write(off, to_vec(b)); })
      .def("serialize", [](const PeImage& p) { return to_py(p.bytes()); });

  m.def("parse_pe", [](const py::bytes& b, bool strict) { return parse_pe(to_vec(b), {strict}); }, py::arg("data"),
        py::arg("strict") = false);
  m.def("serialize", [](const PeImage& p) { return to_py(p.bytes()); });
  m.def("rva_to_va", &rva_to_va, py::arg("image_base"), py::arg("rva"));
  m.def("rva_to_file_offset", &rva_to_file_offset, py::arg("image"), py::arg("rva"));
  m.def("file_offset_to_rva", &file_offset_to_rva, py::arg("image"), py::arg("offset"));
  m.def("header_slack", &header_slack);
  m.def("section_slack", &section_slack, py::arg("image"), py::arg("index"));

  py::class_<CapacityReport>(m, "CapacityReport")
      .def_readonly("region", &CapacityReport::region)
      .def_readonly("total", &CapacityReport::total)
      .def_readonly("overhead", &CapacityReport::overhead)
      .def_readonly("usable", &CapacityReport::usable);

  m.def("capacity", [](const PeImage& p, const std::string& name) { return capacity(p, name); });
  m.def(
      "hide",
      [](const PeImage& p, const std::string& name, const py::bytes& data, bool force) {
        return hide(p, name, to_vec(data), HideOptions{force});
      },
      py::arg("image"), py::arg("name"), py::arg("data"), py::arg("force") = false);
  m.def("retract", [](const PeImage& p) {
    auto rec = retract(p);
    return py::make_tuple(rec.name, to_py(rec.data));
  });
  m.def(
      "write_extracted_file",
      [](const std::string& name, const py::bytes& data, const std::filesystem::path& dir) {
        return write_extracted_file(name, to_vec(data), dir);
      },
      py::arg("name"), py::arg("data"), py::arg("out_dir"));
  m.def("crc32", [](const py::bytes& b) { return crc32(to_vec(b)); });

  py::class_<EquivalenceReport>(m, "EquivalenceReport")
      .def_readonly("length_before", &EquivalenceReport::length_before)
      .def_readonly("length_after", &EquivalenceReport::length_after)
      .def_readonly("identical_headers", &EquivalenceReport::identical_headers)
      .def_readonly("identical_section_table", &EquivalenceReport::identical_section_table)
      .def_readonly("slack", &EquivalenceReport::slack)
      .def_readonly("diff_regions", &EquivalenceReport::diff_regions)
      .def_readonly("diff_confined_to_slack", &EquivalenceReport::diff_confined_to_slack)
      .def_readonly("notes", &EquivalenceReport::notes)
      .def("to_text", [](const EquivalenceReport& r) { return to_text(r); })
      .def("to_structured", [](const EquivalenceReport& r) { return to_structured(r); });

  m.def("compare", [](const py::bytes& a, const py::bytes& b) { return compare(to_vec(a), to_vec(b)); });
  m.def("validate_pe", [](const py::bytes& b) { return issues_to_py(validate_pe(to_vec(b))); });

  py::class_<stat::Carrier>(m, "Carrier")
      .def(py::init([](std::uint32_t w, std::uint32_t h, const py::bytes& px) {
             return stat::Carrier{w, h, to_vec(px)};
           }),
           py::arg("width"), py::arg("height"), py::arg("pixels"))
      .def_readonly("width", &stat::Carrier::width)
      .def_readonly("height", &stat::Carrier::height)
      .def_property_readonly("pixels", [](const stat::Carrier& c) { return to_py(c.pixels); })
      .def("__eq__", [](const stat::Carrier& a, const stat::Carrier& b) { return a == b; });

  py::class_<stat::DetectionStatistic>(m, "DetectionStatistic")
      .def_readonly("q", &stat::DetectionStatistic::q)
      .def_readonly("sigma_hat", &stat::DetectionStatistic::sigma_hat)
      .def_readonly("mean_c", &stat::DetectionStatistic::mean_c)
      .def_readonly("mean_d", &stat::DetectionStatistic::mean_d);

  m.def("parse_key", [](const std::string& text) { return to_py(parse_key(text)); });
  m.def("normal_quantile", &stat::normal_quantile);
  m.def("derive_pattern",
        [](const py::bytes& key, std::size_t n) { return stat::derive_pattern(to_vec(key), n).bits; });

  auto block_of = [](const std::vector<std::uint8_t>& values, std::pair<std::uint32_t, std::uint32_t> shape) {
    return stat::CarrierBlock{0, shape.first, shape.second, values};
  };
  auto pattern_of = [](const std::vector<std::uint8_t>& bits) {
    return stat::KeyPattern{bits, static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1))};
  };
  m.def(
      "split_block",
      [=](const std::vector<std::uint8_t>& values, const std::vector<std::uint8_t>& pattern) {
        auto s = stat::split_block(block_of(values, {1, static_cast<std::uint32_t>(values.size())}),
                                   pattern_of(pattern));
        return py::make_tuple(s.c, s.d);
      },
      py::arg("values"), py::arg("pattern"));
  m.def(
      "embed_bit",
      [=](const std::vector<std::uint8_t>& values, const std::vector<std::uint8_t>& pattern, int k, int bit) {
        return stat::embed_bit(block_of(values, {1, static_cast<std::uint32_t>(values.size())}), pattern_of(pattern),
                               k, bit)
            .values;
      },
      py::arg("values"), py::arg("pattern"), py::arg("k"), py::arg("bit"));
  m.def(
      "statistic",
      [=](const std::vector<std::uint8_t>& values, const std::vector<std::uint8_t>& pattern) {
        return stat::statistic(block_of(values, {1, static_cast<std::uint32_t>(values.size())}), pattern_of(pattern));
      },
      py::arg("values"), py::arg("pattern"));
  m.def(
      "detect_bit", [](double q, double alpha) { return q > stat::normal_quantile(1.0 - alpha) ? 1 : 0; },
      py::arg("q"), py::arg("alpha") = 0.05);

  using Block = std::pair<std::uint32_t, std::uint32_t>;
  m.def(
      "embed_message",
      [](const stat::Carrier& c, const py::bytes& key, const std::vector<std::uint8_t>& bits, Block block, int k,
         double alpha) {
        return stat::embed_message(c, to_vec(key), stat::MessageLayout{bits}, params_from(block, k, alpha));
      },
      py::arg("carrier"), py::arg("key"), py::arg("bits"), py::arg("block") = Block{8, 8}, py::arg("k") = 10,
      py::arg("alpha") = 0.05);
  m.def(
      "extract_message",
      [](const stat::Carrier& c, const py::bytes& key, std::size_t n, Block block, int k, double alpha) {
        return stat::extract_message(c, to_vec(key), n, params_from(block, k, alpha));
      },
      py::arg("carrier"), py::arg("key"), py::arg("bit_count"), py::arg("block") = Block{8, 8}, py::arg("k") = 10,
      py::arg("alpha") = 0.05);
  m.def(
      "block_statistics",
      [](const stat::Carrier& c, const py::bytes& key, std::size_t n, Block block, int k, double alpha) {
        return stat::block_statistics(c, to_vec(key), n, params_from(block, k, alpha));
      },
      py::arg("carrier"), py::arg("key"), py::arg("bit_count"), py::arg("block") = Block{8, 8}, py::arg("k") = 10,
      py::arg("alpha") = 0.05);
  m.def("read_pgm", [](const py::bytes& b) { return read_pgm(to_vec(b)); });
  m.def("write_pgm", [](const stat::Carrier& c) { return to_py(write_pgm(c)); });
}
