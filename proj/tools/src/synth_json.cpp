#include <string>

#include "embclf/error.hpp"
#include "embclf_cli/cli.hpp"

namespace embclf::cli {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  return doc.contains(key) ? doc.at(key).get<T>() : fallback;
}

SynthSpec from_layout(const json& doc) {
  const auto layout = doc.at("layout").get<std::string>();
  const auto d = doc.at("dimension").get<std::uint32_t>();
  SynthSpec spec;
  if (layout == "two_cluster") {
    spec = two_cluster_layout(d, doc.at("offset").get<double>(), get_or(doc, "stddev", 1.0),
                              doc.at("per_class").get<std::uint64_t>());
  } else if (layout == "xor") {
    spec = xor_layout(d, doc.at("scale").get<double>(), get_or(doc, "base", 0.0), get_or(doc, "stddev", 1.0),
                      doc.at("per_cluster").get<std::uint64_t>());
  } else if (layout == "confounder") {
    spec = confounder_layout(d, doc.at("groups").get<std::uint32_t>(), doc.at("per_cluster").get<std::uint64_t>(),
                             get_or(doc, "content_sd", 1.0), get_or(doc, "scale", 1.0), get_or(doc, "stddev", 0.5),
                             get_or<std::uint64_t>(doc, "layout_seed", 0));
  } else if (layout == "shifted") {
    spec = shifted_layout(d, doc.at("separation").get<double>(), get_or(doc, "shift", 0.0),
                          get_or(doc, "rotate", 0.0), get_or(doc, "stddev", 1.0),
                          doc.at("per_class").get<std::uint64_t>(), get_or<std::string>(doc, "tag", "synth"));
  } else {
    throw ValidationError("synth spec: unknown layout '" + layout + "'");
  }
  return spec;
}

}  // namespace

SynthSpec synth_spec_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw ValidationError("synth spec: top level must be an object");
    SynthSpec spec;
    if (doc.contains("layout")) {
      spec = from_layout(doc);
    } else {
      spec.dimension = doc.at("dimension").get<std::uint32_t>();
      for (const auto& c : doc.at("clusters")) {
        SynthCluster cl;
        if (c.contains("mean")) cl.mean = c.at("mean").get<std::vector<double>>();
        else cl.mean.assign(spec.dimension, get_or(c, "mean_fill", 0.0));
        cl.stddev = get_or(c, "stddev", 1.0);
        cl.count = c.at("count").get<std::uint64_t>();
        cl.label = c.at("label").get<std::uint8_t>();
        cl.dataset_tag = get_or<std::string>(c, "dataset_tag", "synth");
        spec.clusters.push_back(std::move(cl));
      }
    }
    if (doc.contains("provenance")) spec.provenance = doc.at("provenance").get<std::string>();
    if (doc.contains("splits")) {
      const auto& s = doc.at("splits");
      spec.splits.train = s.at("train").get<double>();
      spec.splits.val = s.at("val").get<double>();
      spec.splits.test = s.at("test").get<double>();
    }
    return spec;
  } catch (const json::exception& e) {
    throw FormatError(std::string("synth spec: ") + e.what());
  }
}

}  // namespace embclf::cli
