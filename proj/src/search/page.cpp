#include "archner/search/page.hpp"

#include <cmath>
#include <set>

#include "archner/text.hpp"

namespace archner::search {

using nlohmann::json;

namespace {

void require(bool cond, const std::string& code, const std::string& message) {
  if (!cond) throw InvalidInput(code, message);
}

EntityType entity_type_key(const std::string& key, const std::string& code) {
  const auto t = parse_entity_type(key);
  require(t.has_value(), code, "unknown entity type '" + key + "'");
  return *t;
}

void check_fields(const json& j, const std::set<std::string>& allowed, const std::string& code,
                  const std::string& what) {
  require(j.is_object(), code, what + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    require(allowed.count(key) > 0, code, "unknown field '" + key + "' in " + what);
  }
}

json point_to_json(const GeoPoint& p) { return {{"lon", p.lon}, {"lat", p.lat}}; }

GeoPoint point_from_json(const json& j, const std::string& code) {
  check_fields(j, {"lon", "lat"}, code, "coordinate");
  GeoPoint p{j.at("lon").get<double>(), j.at("lat").get<double>()};
  require(std::isfinite(p.lon) && std::isfinite(p.lat), code, "coordinates must be finite");
  return p;
}

std::map<EntityType, std::vector<std::string>> entities_from_json(const json& j,
                                                                  const std::string& code) {
  require(j.is_object(), code, "entity lists must be an object keyed by entity type");
  std::map<EntityType, std::vector<std::string>> out;
  for (const auto& [key, list] : j.items()) {
    require(list.is_array(), code, "entity list for " + key + " must be an array");
    auto& terms = out[entity_type_key(key, code)];
    for (const auto& t : list) terms.push_back(t.get<std::string>());
  }
  return out;
}

json entities_to_json(const std::map<EntityType, std::vector<std::string>>& entities) {
  json out = json::object();
  for (const auto& [type, list] : entities) out[std::string(to_string(type))] = list;
  return out;
}

template <typename Fn>
auto wrap(const std::string& code, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw InvalidInput(code, e.what());
  }
}

}  // namespace

void validate(PageRecord& page) {
  require(!page.doc_id.empty(), "invalid_record", "doc_id must not be empty");
  require(page.page_no >= 1, "invalid_record", "page_no must be >= 1");
  for (auto& [type, list] : page.entities) {
    for (auto& s : list) {
      s = text::normalize_phrase(s);
      require(!s.empty(), "invalid_record", "empty entity surface");
    }
  }
  for (const auto& r : page.year_ranges) {
    require(r.start <= r.end, "invalid_record", "year range start after end");
  }
  if (page.metadata.coord) {
    require(std::isfinite(page.metadata.coord->lon) && std::isfinite(page.metadata.coord->lat),
            "invalid_record", "coordinates must be finite");
  }
}

void validate(const Query& q) {
  require(q.size >= 1, "invalid_query", "page size must be >= 1");
  require(q.bbox_or_polygon.empty() || q.bbox_or_polygon.size() >= 3, "invalid_query",
          "a polygon needs at least 3 vertices");
  if (q.date) require(q.date->start <= q.date->end, "invalid_query", "date start after end");
}

json to_json(const PageRecord& page) {
  json j;
  j["doc_id"] = page.doc_id;
  j["page_no"] = page.page_no;
  j["text"] = page.text;
  j["entities"] = entities_to_json(page.entities);
  j["year_ranges"] = json::array();
  for (const auto& r : page.year_ranges) {
    j["year_ranges"].push_back({{"start", r.start}, {"end", r.end}});
  }
  json meta = {{"doc_type", page.metadata.doc_type}, {"subject", page.metadata.subject}};
  if (page.metadata.coord) meta["coord"] = point_to_json(*page.metadata.coord);
  j["metadata"] = std::move(meta);
  return j;
}

PageRecord page_from_json(const json& j) {
  const std::string code = "invalid_record";
  return wrap(code, [&] {
    check_fields(j, {"doc_id", "page_no", "text", "entities", "year_ranges", "metadata"}, code,
                 "page record");
    PageRecord p;
    p.doc_id = j.at("doc_id").get<std::string>();
    p.page_no = j.at("page_no").get<int>();
    p.text = j.value("text", "");
    if (j.contains("entities")) p.entities = entities_from_json(j.at("entities"), code);
    if (j.contains("year_ranges")) {
      for (const auto& r : j.at("year_ranges")) {
        p.year_ranges.push_back({r.at("start").get<int>(), r.at("end").get<int>()});
      }
    }
    if (j.contains("metadata")) {
      const auto& m = j.at("metadata");
      check_fields(m, {"doc_type", "subject", "coord"}, code, "metadata");
      p.metadata.doc_type = m.value("doc_type", "");
      p.metadata.subject = m.value("subject", "");
      if (m.contains("coord") && !m.at("coord").is_null()) {
        p.metadata.coord = point_from_json(m.at("coord"), code);
      }
    }
    validate(p);
    return p;
  });
}

json to_json(const Query& q) {
  json j = json::object();
  if (!q.entity_filters.empty()) j["entity_filters"] = entities_to_json(q.entity_filters);
  if (q.date) {
    j["date"] = {{"mode", q.date->mode == DateMode::Contain ? "contain" : "overlap"},
                 {"start", q.date->start},
                 {"end", q.date->end}};
  }
  if (q.fulltext) j["fulltext"] = *q.fulltext;
  json facets = json::object();
  if (q.facet_filters.doc_type) facets["doc_type"] = *q.facet_filters.doc_type;
  if (q.facet_filters.subject) facets["subject"] = *q.facet_filters.subject;
  if (!facets.empty()) j["facet_filters"] = std::move(facets);
  if (!q.bbox_or_polygon.empty()) {
    j["bbox_or_polygon"] = json::array();
    for (const auto& p : q.bbox_or_polygon) j["bbox_or_polygon"].push_back(point_to_json(p));
  }
  j["page"] = {{"from", q.from}, {"size", q.size}};
  return j;
}

Query query_from_json(const json& j) {
  const std::string code = "invalid_query";
  return wrap(code, [&] {
    check_fields(j,
                 {"entity_filters", "date", "fulltext", "facet_filters", "bbox_or_polygon", "page"},
                 code, "query");
    Query q;
    if (j.contains("entity_filters")) {
      for (auto& [type, terms] : entities_from_json(j.at("entity_filters"), code)) {
        std::vector<std::string> norm;
        for (const auto& t : terms) {
          auto n = text::normalize_phrase(t);
          if (!n.empty()) norm.push_back(std::move(n));
        }
        if (!norm.empty()) q.entity_filters[type] = std::move(norm);
      }
    }
    if (j.contains("date")) {
      const auto& d = j.at("date");
      check_fields(d, {"mode", "start", "end"}, code, "date filter");
      DateFilter f;
      const auto mode = d.value("mode", "contain");
      require(mode == "contain" || mode == "overlap", code, "date mode must be contain or overlap");
      f.mode = mode == "contain" ? DateMode::Contain : DateMode::Overlap;
      f.start = d.at("start").get<int>();
      f.end = d.at("end").get<int>();
      q.date = f;
    }
    if (j.contains("fulltext")) q.fulltext = j.at("fulltext").get<std::string>();
    if (j.contains("facet_filters")) {
      const auto& f = j.at("facet_filters");
      check_fields(f, {"doc_type", "subject"}, code, "facet filters");
      if (f.contains("doc_type")) q.facet_filters.doc_type = f.at("doc_type").get<std::string>();
      if (f.contains("subject")) q.facet_filters.subject = f.at("subject").get<std::string>();
    }
    if (j.contains("bbox_or_polygon")) {
      for (const auto& p : j.at("bbox_or_polygon")) {
        q.bbox_or_polygon.push_back(point_from_json(p, code));
      }
    }
    if (j.contains("page")) {
      const auto& p = j.at("page");
      check_fields(p, {"from", "size"}, code, "page");
      const auto from = p.value("from", 0LL);
      const auto size = p.value("size", 10LL);
      require(from >= 0, code, "page.from must be >= 0");
      require(size >= 1, code, "page size must be >= 1");
      q.from = static_cast<std::size_t>(from);
      q.size = static_cast<std::size_t>(size);
    }
    validate(q);
    return q;
  });
}

json to_json(const SearchResult& r) {
  json j;
  j["total"] = r.total;
  j["hits"] = json::array();
  for (const auto& h : r.hits) {
    j["hits"].push_back(
        {{"doc_id", h.doc_id}, {"page_no", h.page_no}, {"score", h.score}, {"snippet", h.snippet}});
  }
  j["facets"] = r.facets;
  return j;
}

SearchResult result_from_json(const json& j) {
  SearchResult r;
  r.total = j.at("total").get<std::size_t>();
  for (const auto& h : j.at("hits")) {
    r.hits.push_back({h.at("doc_id").get<std::string>(), h.at("page_no").get<int>(),
                      h.at("score").get<double>(), h.at("snippet").get<std::string>()});
  }
  r.facets = j.at("facets").get<std::map<std::string, std::map<std::string, std::size_t>>>();
  return r;
}

}  // namespace archner::search
