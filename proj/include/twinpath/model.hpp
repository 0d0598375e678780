#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "twinpath/detail/sha256.hpp"
#include "twinpath/logic.hpp"
#include "twinpath/value.hpp"

namespace twinpath {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ParseError : public ModelError {
public:
    using ModelError::ModelError;
};
class ReferenceError : public ModelError {
public:
    using ModelError::ModelError;
};
class TypeMismatchError : public ModelError {
public:
    using ModelError::ModelError;
};

enum class EntityKind : uint8_t { container, link };
enum class OwnerKind : uint8_t { network, container, link };

struct EntityRef {
    EntityKind kind;
    uint32_t idx;
    bool operator==(const EntityRef&) const = default;
};

// A fact owner: the network itself, a container, or a link.
struct OwnerRef {
    OwnerKind kind = OwnerKind::network;
    uint32_t idx = 0;
    bool operator==(const OwnerRef&) const = default;

    static OwnerRef network() { return {OwnerKind::network, 0}; }
    static OwnerRef of(EntityRef e) {
        return {e.kind == EntityKind::container ? OwnerKind::container : OwnerKind::link, e.idx};
    }
    std::optional<EntityRef> entity() const {
        if (kind == OwnerKind::network) return std::nullopt;
        return EntityRef{kind == OwnerKind::container ? EntityKind::container : EntityKind::link,
                         idx};
    }
};

struct CommonProperty {
    std::string id;
    std::string name;
    ValueKind kind;
};

struct ContainerType {
    std::string id;
    std::string name;
};

struct Fact {
    std::string id;
    std::string name;
    std::optional<uint32_t> cp;
    FactValue value;
    OwnerRef owner;
};

struct Container {
    std::string id;
    std::string name;
    std::vector<uint32_t> facts;
    std::optional<uint32_t> parent;
    std::optional<uint32_t> type;
};

struct Link {
    std::string id;
    std::string name;
    std::vector<uint32_t> facts;
    uint32_t source = 0;
    uint32_t destination = 0;
    Decimal traversability;
};

struct Action {
    std::string id;
    std::string description;
    std::string command;
};

enum class ReqLocation : uint8_t { container1, link, container2, network };

inline const char* to_string(ReqLocation l) {
    switch (l) {
        case ReqLocation::container1: return "container1";
        case ReqLocation::link: return "link";
        case ReqLocation::container2: return "container2";
        case ReqLocation::network: return "network";
    }
    return "?";
}

// Where a pre/postcondition input value comes from: a concrete fact id or a
// common property looked up on the requirement's location.
struct Requirement {
    ReqLocation location;
    bool by_cp;
    uint32_t index;  // fact index or common-property index
};

struct Precondition {
    std::string id;
    std::vector<Requirement> requirements;
    ExprPtr expression;
};

struct PostTarget {
    enum class Kind : uint8_t { fact, entity_cp, all_with_cp };
    Kind kind = Kind::fact;
    uint32_t fact = 0;          // Kind::fact
    bool at_location = false;   // Kind::entity_cp: keyword vs explicit entity
    ReqLocation location = ReqLocation::container2;
    EntityRef entity{EntityKind::container, 0};
    uint32_t cp = 0;            // Kind::entity_cp / Kind::all_with_cp
};

struct Postcondition {
    std::string id;
    std::vector<Requirement> requirements;
    ExprPtr expression;
    PostTarget target;
};

struct CiaMetrics {
    Decimal confidentiality;
    Decimal integrity;
    Decimal availability;
};

struct Rule {
    std::string id;
    std::string name;
    bool is_traversal = false;
    Decimal success;
    Decimal run_time;
    CiaMetrics cia;
    std::vector<Precondition> preconditions;
    std::vector<Postcondition> postconditions;
    std::vector<uint32_t> actions;
};

enum class RevisitPolicy : uint8_t { link_once, container_once, unlimited };

inline const char* to_string(RevisitPolicy p) {
    switch (p) {
        case RevisitPolicy::link_once: return "link-once";
        case RevisitPolicy::container_once: return "container-once";
        case RevisitPolicy::unlimited: return "unlimited";
    }
    return "?";
}

struct Scenario {
    std::string name;
    uint32_t start_container = 0;
    uint32_t end_container = 0;
    uint32_t max_nontraversal_per_connection = 0;
    std::unordered_set<std::string> pre_ignore_missing;   // precondition ids
    std::unordered_set<uint32_t> post_ignore_facts;
    std::unordered_set<uint32_t> post_ignore_cpids;
    std::unordered_set<uint32_t> post_create_cpids;
    std::vector<std::pair<uint32_t, FactValue>> initial_overrides;
    RevisitPolicy revisit_policy = RevisitPolicy::link_once;
    std::optional<uint64_t> max_connections;
    std::optional<std::chrono::milliseconds> time_limit;
    bool branch_on_traversal_rules = false;
};

// The immutable base model. Built once by load_model; every id is interned to
// a dense index and all cross-references are pre-resolved. Shared read-only
// across threads and nodes.
struct Network {
    std::vector<CommonProperty> common_properties;
    std::vector<ContainerType> container_types;
    std::vector<Container> containers;
    std::vector<Link> links;
    std::vector<Fact> facts;
    std::vector<Action> actions;
    std::vector<Rule> rules;
    std::vector<Scenario> scenarios;
    std::vector<uint32_t> network_facts;

    // Derived, read-only after load.
    std::vector<std::vector<uint32_t>> outgoing;     // per container; traversability desc, id asc
    std::vector<std::vector<uint32_t>> facts_by_cp;  // per common property
    std::vector<uint32_t> rule_order;                // success desc, rule id asc

    std::unordered_map<std::string, uint32_t> fact_index;
    std::unordered_map<std::string, uint32_t> container_index;
    std::unordered_map<std::string, uint32_t> link_index;
    std::unordered_map<std::string, uint32_t> cp_index;
    std::unordered_map<std::string, uint32_t> rule_index;
    std::unordered_map<std::string, uint32_t> action_index;
    std::unordered_map<std::string, uint32_t> ctype_index;
    std::unordered_map<std::string, uint32_t> scenario_index;

    uint32_t base_fact_count() const { return uint32_t(facts.size()); }

    const Scenario* find_scenario(const std::string& name) const {
        auto it = scenario_index.find(name);
        return it == scenario_index.end() ? nullptr : &scenarios[it->second];
    }

    const std::string& entity_id(EntityRef e) const {
        return e.kind == EntityKind::container ? containers[e.idx].id : links[e.idx].id;
    }

    const std::string& entity_name(EntityRef e) const {
        return e.kind == EntityKind::container ? containers[e.idx].name : links[e.idx].name;
    }

    const std::vector<uint32_t>& owner_facts(OwnerRef o) const {
        switch (o.kind) {
            case OwnerKind::network: return network_facts;
            case OwnerKind::container: return containers[o.idx].facts;
            case OwnerKind::link: return links[o.idx].facts;
        }
        throw std::logic_error("bad owner");
    }

    // "network" is the spelled-out owner id; entities use their own ids.
    std::string owner_id(OwnerRef o) const {
        if (o.kind == OwnerKind::network) return "network";
        return entity_id(*o.entity());
    }

    ValueKind fact_kind(uint32_t fact_idx) const { return facts[fact_idx].value.kind(); }
};

struct Diagnostic {
    std::string id;       // offending object id
    std::string message;
};

// Post-create facts get deterministic ids derived from (owner, cp) so that
// identical paths serialize identically on every node. The "pc!" prefix is
// reserved; the length field keeps distinct pairs from colliding.
inline std::string post_create_fact_id(const std::string& owner_id, const std::string& cp_id) {
    return "pc!" + std::to_string(owner_id.size()) + "!" + owner_id + cp_id;
}

namespace detail_model {

class Loader {
public:
    explicit Loader(const json& doc) : doc_(doc) {}

    Network load() {
        if (!doc_.is_object()) throw ParseError("model document must be a JSON object");
        if (!doc_.contains("format") || !doc_["format"].is_number_integer() ||
            doc_["format"].get<int>() != 1)
            throw ParseError("model document requires \"format\": 1");

        load_common_properties();
        load_container_types();
        declare_containers();
        load_containers();
        load_links();
        load_actions();
        load_rules();
        load_scenarios();
        build_derived();
        return std::move(net_);
    }

private:
    const json& doc_;
    Network net_;

    static const json& arr(const json& parent, const char* key) {
        static const json empty = json::array();
        if (!parent.contains(key)) return empty;
        const json& v = parent.at(key);
        if (!v.is_array()) throw ParseError(std::string(key) + " must be an array");
        return v;
    }

    static std::string str_field(const json& o, const char* key, const std::string& ctx) {
        if (!o.contains(key) || !o.at(key).is_string())
            throw ParseError(ctx + ": missing string field \"" + key + "\"");
        return o.at(key).get<std::string>();
    }

    static std::string opt_str(const json& o, const char* key) {
        if (!o.contains(key)) return "";
        if (!o.at(key).is_string()) throw ParseError(std::string(key) + " must be a string");
        return o.at(key).get<std::string>();
    }

    static Decimal dec_field(const json& o, const char* key, const std::string& ctx,
                             const char* dflt = "0") {
        if (!o.contains(key)) return Decimal::parse(dflt);
        if (!o.at(key).is_string())
            throw ParseError(ctx + ": decimal field \"" + key +
                             "\" must be a string (exactness)");
        auto d = Decimal::try_parse(o.at(key).get<std::string>());
        if (!d) throw ParseError(ctx + ": invalid decimal in \"" + key + "\"");
        return *d;
    }

    template <class Map>
    static void intern(Map& map, const std::string& id, uint32_t idx, const char* what) {
        if (id.empty()) throw ParseError(std::string(what) + " with empty id");
        if (!map.emplace(id, idx).second)
            throw ParseError(std::string("duplicate ") + what + " id: '" + id + "'");
    }

    uint32_t resolve(const std::unordered_map<std::string, uint32_t>& map, const std::string& id,
                     const char* what, const std::string& ctx) const {
        auto it = map.find(id);
        if (it == map.end())
            throw ReferenceError(ctx + ": unknown " + what + " '" + id + "'");
        return it->second;
    }

    void load_common_properties() {
        for (const auto& o : arr(doc_, "common_properties")) {
            CommonProperty cp;
            cp.id = str_field(o, "id", "common_properties");
            cp.name = opt_str(o, "name");
            cp.kind = value_kind_from_string(str_field(o, "kind", "common_property " + cp.id));
            intern(net_.cp_index, cp.id, uint32_t(net_.common_properties.size()),
                   "common property");
            net_.common_properties.push_back(std::move(cp));
        }
    }

    void load_container_types() {
        for (const auto& o : arr(doc_, "container_types")) {
            ContainerType t;
            t.id = str_field(o, "id", "container_types");
            t.name = opt_str(o, "name");
            intern(net_.ctype_index, t.id, uint32_t(net_.container_types.size()),
                   "container type");
            net_.container_types.push_back(std::move(t));
        }
    }

    // Containers are declared before links/facts resolve against them.
    void declare_containers() {
        for (const auto& o : arr(doc_, "containers")) {
            Container c;
            c.id = str_field(o, "id", "containers");
            c.name = opt_str(o, "name");
            intern(net_.container_index, c.id, uint32_t(net_.containers.size()), "container");
            net_.containers.push_back(std::move(c));
        }
    }

    uint32_t load_fact(const json& o, OwnerRef owner, const std::string& ctx) {
        Fact f{.id = str_field(o, "id", ctx),
               .name = opt_str(o, "name"),
               .cp = std::nullopt,
               .value = FactValue(),
               .owner = owner};
        if (f.id.rfind("pc!", 0) == 0)
            throw ParseError(ctx + ": fact id '" + f.id + "' uses the reserved \"pc!\" prefix");
        if (!o.contains("value")) throw ParseError(ctx + ": fact '" + f.id + "' missing value");
        try {
            f.value = FactValue::from_json(o.at("value"));
        } catch (const ValueError& e) {
            throw ParseError(ctx + ": fact '" + f.id + "': " + e.what());
        } catch (const DecimalError& e) {
            throw ParseError(ctx + ": fact '" + f.id + "': " + e.what());
        }
        if (o.contains("cpid")) {
            if (!o.at("cpid").is_string()) throw ParseError(ctx + ": cpid must be a string");
            uint32_t cp = resolve(net_.cp_index, o.at("cpid").get<std::string>(),
                                  "common property", ctx + " fact '" + f.id + "'");
            if (net_.common_properties[cp].kind != f.value.kind())
                throw TypeMismatchError("fact '" + f.id + "' has " +
                                        std::string(to_string(f.value.kind())) +
                                        " value but its common property '" +
                                        net_.common_properties[cp].id + "' requires " +
                                        to_string(net_.common_properties[cp].kind));
            f.cp = cp;
        }
        uint32_t idx = uint32_t(net_.facts.size());
        intern(net_.fact_index, f.id, idx, "fact");
        net_.facts.push_back(std::move(f));
        return idx;
    }

    void load_containers() {
        const auto& cs = arr(doc_, "containers");
        for (size_t i = 0; i < cs.size(); ++i) {
            Container& c = net_.containers[i];
            const json& o = cs[i];
            std::string ctx = "container '" + c.id + "'";
            for (const auto& fo : arr(o, "facts"))
                c.facts.push_back(load_fact(fo, OwnerRef{OwnerKind::container, uint32_t(i)}, ctx));
            if (o.contains("parent"))
                c.parent = resolve(net_.container_index, o.at("parent").get<std::string>(),
                                   "container", ctx);
            if (o.contains("container_type"))
                c.type = resolve(net_.ctype_index, o.at("container_type").get<std::string>(),
                                 "container type", ctx);
        }
        for (const auto& fo : arr(doc_, "facts"))
            net_.network_facts.push_back(load_fact(fo, OwnerRef::network(), "network facts"));
    }

    void load_links() {
        for (const auto& o : arr(doc_, "links")) {
            Link l;
            l.id = str_field(o, "id", "links");
            l.name = opt_str(o, "name");
            std::string ctx = "link '" + l.id + "'";
            intern(net_.link_index, l.id, uint32_t(net_.links.size()), "link");
            l.source = resolve(net_.container_index, str_field(o, "source", ctx), "container", ctx);
            l.destination =
                resolve(net_.container_index, str_field(o, "destination", ctx), "container", ctx);
            l.traversability = dec_field(o, "traversability", ctx, "1");
            uint32_t idx = uint32_t(net_.links.size());
            net_.links.push_back(std::move(l));
            for (const auto& fo : arr(o, "facts"))
                net_.links[idx].facts.push_back(
                    load_fact(fo, OwnerRef{OwnerKind::link, idx}, ctx));
        }
    }

    void load_actions() {
        for (const auto& o : arr(doc_, "actions")) {
            Action a;
            a.id = str_field(o, "id", "actions");
            a.description = opt_str(o, "description");
            a.command = str_field(o, "command", "action '" + a.id + "'");
            intern(net_.action_index, a.id, uint32_t(net_.actions.size()), "action");
            net_.actions.push_back(std::move(a));
        }
    }

    Requirement load_requirement(const json& o, const std::string& ctx) {
        Requirement r{};
        std::string loc = str_field(o, "location", ctx);
        if (loc == "container1") r.location = ReqLocation::container1;
        else if (loc == "link") r.location = ReqLocation::link;
        else if (loc == "container2") r.location = ReqLocation::container2;
        else if (loc == "network") r.location = ReqLocation::network;
        else throw ParseError(ctx + ": unknown requirement location '" + loc + "'");
        bool has_fact = o.contains("fact"), has_cp = o.contains("cpid");
        if (has_fact == has_cp)
            throw ParseError(ctx + ": requirement needs exactly one of \"fact\" / \"cpid\"");
        if (has_fact) {
            r.by_cp = false;
            r.index = resolve(net_.fact_index, o.at("fact").get<std::string>(), "fact", ctx);
        } else {
            r.by_cp = true;
            r.index =
                resolve(net_.cp_index, o.at("cpid").get<std::string>(), "common property", ctx);
        }
        return r;
    }

    ExprPtr load_expr(const json& o, const std::string& ctx) {
        try {
            return expr_from_json(o);
        } catch (const ValueError& e) {
            throw ParseError(ctx + ": " + e.what());
        } catch (const DecimalError& e) {
            throw ParseError(ctx + ": " + e.what());
        }
    }

    PostTarget load_target(const json& o, const std::string& ctx) {
        if (!o.is_object() || o.size() != 1)
            throw ParseError(ctx + ": target must be a single-key object");
        PostTarget t;
        if (o.contains("fact")) {
            t.kind = PostTarget::Kind::fact;
            t.fact = resolve(net_.fact_index, o.at("fact").get<std::string>(), "fact", ctx);
            return t;
        }
        if (o.contains("all_with_cpid")) {
            t.kind = PostTarget::Kind::all_with_cp;
            t.cp = resolve(net_.cp_index, o.at("all_with_cpid").get<std::string>(),
                           "common property", ctx);
            return t;
        }
        if (o.contains("entity_cpid")) {
            const json& e = o.at("entity_cpid");
            t.kind = PostTarget::Kind::entity_cp;
            t.cp = resolve(net_.cp_index, str_field(e, "cpid", ctx), "common property", ctx);
            std::string where = str_field(e, "entity", ctx);
            // Location keywords win; anything else must be an entity id.
            if (where == "container1") { t.at_location = true; t.location = ReqLocation::container1; }
            else if (where == "link") { t.at_location = true; t.location = ReqLocation::link; }
            else if (where == "container2") { t.at_location = true; t.location = ReqLocation::container2; }
            else if (where == "network") { t.at_location = true; t.location = ReqLocation::network; }
            else if (auto it = net_.container_index.find(where); it != net_.container_index.end()) {
                t.at_location = false;
                t.entity = EntityRef{EntityKind::container, it->second};
            } else if (auto lt = net_.link_index.find(where); lt != net_.link_index.end()) {
                t.at_location = false;
                t.entity = EntityRef{EntityKind::link, lt->second};
            } else {
                throw ReferenceError(ctx + ": unknown target entity '" + where + "'");
            }
            return t;
        }
        throw ParseError(ctx + ": target must be \"fact\", \"entity_cpid\" or \"all_with_cpid\"");
    }

    void load_rules() {
        for (const auto& o : arr(doc_, "rules")) {
            Rule r;
            r.id = str_field(o, "id", "rules");
            r.name = opt_str(o, "name");
            std::string ctx = "rule '" + r.id + "'";
            if (!o.contains("is_traversal") || !o.at("is_traversal").is_boolean())
                throw ParseError(ctx + ": missing boolean field \"is_traversal\"");
            r.is_traversal = o.at("is_traversal").get<bool>();
            r.success = dec_field(o, "success", ctx);
            r.run_time = dec_field(o, "run_time", ctx);
            if (o.contains("cia")) {
                const json& c = o.at("cia");
                r.cia.confidentiality = dec_field(c, "confidentiality", ctx);
                r.cia.integrity = dec_field(c, "integrity", ctx);
                r.cia.availability = dec_field(c, "availability", ctx);
            }
            for (const auto& po : arr(o, "preconditions")) {
                Precondition p;
                p.id = str_field(po, "id", ctx + " preconditions");
                std::string pctx = ctx + " precondition '" + p.id + "'";
                for (const auto& ro : arr(po, "requirements"))
                    p.requirements.push_back(load_requirement(ro, pctx));
                if (!po.contains("expression")) throw ParseError(pctx + ": missing expression");
                p.expression = load_expr(po.at("expression"), pctx);
                r.preconditions.push_back(std::move(p));
            }
            for (const auto& po : arr(o, "postconditions")) {
                Postcondition p;
                p.id = str_field(po, "id", ctx + " postconditions");
                std::string pctx = ctx + " postcondition '" + p.id + "'";
                for (const auto& ro : arr(po, "requirements"))
                    p.requirements.push_back(load_requirement(ro, pctx));
                if (!po.contains("expression")) throw ParseError(pctx + ": missing expression");
                p.expression = load_expr(po.at("expression"), pctx);
                if (!po.contains("target")) throw ParseError(pctx + ": missing target");
                p.target = load_target(po.at("target"), pctx);
                r.postconditions.push_back(std::move(p));
            }
            for (const auto& ao : arr(o, "actions"))
                r.actions.push_back(
                    resolve(net_.action_index, ao.get<std::string>(), "action", ctx));
            intern(net_.rule_index, r.id, uint32_t(net_.rules.size()), "rule");
            net_.rules.push_back(std::move(r));
        }
    }

    void load_scenarios() {
        std::unordered_set<std::string> precondition_ids;
        for (const auto& r : net_.rules)
            for (const auto& p : r.preconditions) precondition_ids.insert(p.id);

        for (const auto& o : arr(doc_, "scenarios")) {
            Scenario s;
            s.name = str_field(o, "name", "scenarios");
            std::string ctx = "scenario '" + s.name + "'";
            s.start_container = resolve(net_.container_index,
                                        str_field(o, "start_container", ctx), "container", ctx);
            s.end_container = resolve(net_.container_index, str_field(o, "end_container", ctx),
                                      "container", ctx);
            if (o.contains("max_nontraversal_per_connection")) {
                const json& m = o.at("max_nontraversal_per_connection");
                if (!m.is_number_integer() || m.get<int64_t>() < 0)
                    throw ParseError(ctx + ": max_nontraversal_per_connection must be >= 0");
                s.max_nontraversal_per_connection = m.get<uint32_t>();
            }
            for (const auto& p : arr(o, "pre_ignore_missing")) {
                std::string id = p.get<std::string>();
                if (!precondition_ids.count(id))
                    throw ReferenceError(ctx + ": unknown precondition '" + id +
                                         "' in pre_ignore_missing");
                s.pre_ignore_missing.insert(id);
            }
            for (const auto& p : arr(o, "post_ignore_facts"))
                s.post_ignore_facts.insert(
                    resolve(net_.fact_index, p.get<std::string>(), "fact", ctx));
            for (const auto& p : arr(o, "post_ignore_cpids"))
                s.post_ignore_cpids.insert(
                    resolve(net_.cp_index, p.get<std::string>(), "common property", ctx));
            for (const auto& p : arr(o, "post_create_cpids"))
                s.post_create_cpids.insert(
                    resolve(net_.cp_index, p.get<std::string>(), "common property", ctx));
            if (o.contains("initial_overrides")) {
                const json& ov = o.at("initial_overrides");
                if (!ov.is_object()) throw ParseError(ctx + ": initial_overrides must be an object");
                for (const auto& [fid, val] : ov.items()) {
                    uint32_t fi = resolve(net_.fact_index, fid, "fact", ctx);
                    try {
                        s.initial_overrides.emplace_back(fi, FactValue::from_json(val));
                    } catch (const ValueError& e) {
                        throw ParseError(ctx + ": override for '" + fid + "': " + e.what());
                    }
                }
            }
            if (o.contains("revisit_policy")) {
                std::string p = o.at("revisit_policy").get<std::string>();
                if (p == "link-once") s.revisit_policy = RevisitPolicy::link_once;
                else if (p == "container-once") s.revisit_policy = RevisitPolicy::container_once;
                else if (p == "unlimited") s.revisit_policy = RevisitPolicy::unlimited;
                else throw ParseError(ctx + ": unknown revisit_policy '" + p + "'");
            }
            if (o.contains("max_connections")) {
                const json& m = o.at("max_connections");
                if (!m.is_number_integer() || m.get<int64_t>() < 0)
                    throw ParseError(ctx + ": max_connections must be >= 0");
                s.max_connections = m.get<uint64_t>();
            }
            if (o.contains("time_limit_ms")) {
                const json& m = o.at("time_limit_ms");
                if (!m.is_number_integer() || m.get<int64_t>() < 0)
                    throw ParseError(ctx + ": time_limit_ms must be >= 0");
                s.time_limit = std::chrono::milliseconds(m.get<int64_t>());
            }
            if (o.contains("branch_on_traversal_rules"))
                s.branch_on_traversal_rules = o.at("branch_on_traversal_rules").get<bool>();
            intern(net_.scenario_index, s.name, uint32_t(net_.scenarios.size()), "scenario");
            net_.scenarios.push_back(std::move(s));
        }
    }

    void build_derived() {
        net_.outgoing.assign(net_.containers.size(), {});
        for (uint32_t li = 0; li < net_.links.size(); ++li)
            net_.outgoing[net_.links[li].source].push_back(li);
        for (auto& out : net_.outgoing) {
            std::sort(out.begin(), out.end(), [&](uint32_t a, uint32_t b) {
                int c = net_.links[a].traversability.cmp(net_.links[b].traversability);
                if (c != 0) return c > 0;
                return net_.links[a].id < net_.links[b].id;
            });
        }
        net_.facts_by_cp.assign(net_.common_properties.size(), {});
        for (uint32_t fi = 0; fi < net_.facts.size(); ++fi)
            if (net_.facts[fi].cp) net_.facts_by_cp[*net_.facts[fi].cp].push_back(fi);
        net_.rule_order.resize(net_.rules.size());
        for (uint32_t i = 0; i < net_.rules.size(); ++i) net_.rule_order[i] = i;
        std::sort(net_.rule_order.begin(), net_.rule_order.end(), [&](uint32_t a, uint32_t b) {
            int c = net_.rules[a].success.cmp(net_.rules[b].success);
            if (c != 0) return c > 0;
            return net_.rules[a].id < net_.rules[b].id;
        });
    }
};

}  // namespace detail_model

inline Network load_model(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model is not valid JSON: ") + e.what());
    }
    return detail_model::Loader(doc).load();
}

namespace detail_model {

inline json fact_to_json(const Network& net, const Fact& f) {
    json o;
    o["id"] = f.id;
    o["name"] = f.name;
    o["value"] = f.value.to_json();
    if (f.cp) o["cpid"] = net.common_properties[*f.cp].id;
    return o;
}

inline json requirement_to_json(const Network& net, const Requirement& r) {
    json o;
    o["location"] = to_string(r.location);
    if (r.by_cp) o["cpid"] = net.common_properties[r.index].id;
    else o["fact"] = net.facts[r.index].id;
    return o;
}

inline json target_to_json(const Network& net, const PostTarget& t) {
    switch (t.kind) {
        case PostTarget::Kind::fact: return json{{"fact", net.facts[t.fact].id}};
        case PostTarget::Kind::all_with_cp:
            return json{{"all_with_cpid", net.common_properties[t.cp].id}};
        case PostTarget::Kind::entity_cp: {
            std::string where =
                t.at_location ? to_string(t.location) : net.entity_id(t.entity);
            return json{{"entity_cpid",
                         {{"entity", where}, {"cpid", net.common_properties[t.cp].id}}}};
        }
    }
    throw std::logic_error("bad target");
}

template <class Set, class IdOf>
inline json sorted_ids(const Set& set, IdOf&& id_of) {
    std::vector<std::string> ids;
    for (const auto& v : set) ids.push_back(id_of(v));
    std::sort(ids.begin(), ids.end());
    return json(ids);
}

}  // namespace detail_model

inline json serialize_model(const Network& net) {
    using namespace detail_model;
    json doc;
    doc["format"] = 1;
    doc["common_properties"] = json::array();
    for (const auto& cp : net.common_properties)
        doc["common_properties"].push_back(
            {{"id", cp.id}, {"name", cp.name}, {"kind", to_string(cp.kind)}});
    doc["container_types"] = json::array();
    for (const auto& t : net.container_types)
        doc["container_types"].push_back({{"id", t.id}, {"name", t.name}});
    doc["containers"] = json::array();
    for (const auto& c : net.containers) {
        json o{{"id", c.id}, {"name", c.name}};
        o["facts"] = json::array();
        for (uint32_t fi : c.facts) o["facts"].push_back(fact_to_json(net, net.facts[fi]));
        if (c.parent) o["parent"] = net.containers[*c.parent].id;
        if (c.type) o["container_type"] = net.container_types[*c.type].id;
        doc["containers"].push_back(std::move(o));
    }
    doc["links"] = json::array();
    for (const auto& l : net.links) {
        json o{{"id", l.id},
               {"name", l.name},
               {"source", net.containers[l.source].id},
               {"destination", net.containers[l.destination].id},
               {"traversability", l.traversability.str()}};
        o["facts"] = json::array();
        for (uint32_t fi : l.facts) o["facts"].push_back(fact_to_json(net, net.facts[fi]));
        doc["links"].push_back(std::move(o));
    }
    doc["facts"] = json::array();
    for (uint32_t fi : net.network_facts)
        doc["facts"].push_back(fact_to_json(net, net.facts[fi]));
    doc["actions"] = json::array();
    for (const auto& a : net.actions)
        doc["actions"].push_back(
            {{"id", a.id}, {"description", a.description}, {"command", a.command}});
    doc["rules"] = json::array();
    for (const auto& r : net.rules) {
        json o{{"id", r.id},
               {"name", r.name},
               {"is_traversal", r.is_traversal},
               {"success", r.success.str()},
               {"run_time", r.run_time.str()},
               {"cia",
                {{"confidentiality", r.cia.confidentiality.str()},
                 {"integrity", r.cia.integrity.str()},
                 {"availability", r.cia.availability.str()}}}};
        o["preconditions"] = json::array();
        for (const auto& p : r.preconditions) {
            json po{{"id", p.id}, {"expression", expr_to_json(*p.expression)}};
            po["requirements"] = json::array();
            for (const auto& rq : p.requirements)
                po["requirements"].push_back(requirement_to_json(net, rq));
            o["preconditions"].push_back(std::move(po));
        }
        o["postconditions"] = json::array();
        for (const auto& p : r.postconditions) {
            json po{{"id", p.id},
                    {"expression", expr_to_json(*p.expression)},
                    {"target", target_to_json(net, p.target)}};
            po["requirements"] = json::array();
            for (const auto& rq : p.requirements)
                po["requirements"].push_back(requirement_to_json(net, rq));
            o["postconditions"].push_back(std::move(po));
        }
        o["actions"] = json::array();
        for (uint32_t ai : r.actions) o["actions"].push_back(net.actions[ai].id);
        doc["rules"].push_back(std::move(o));
    }
    doc["scenarios"] = json::array();
    for (const auto& s : net.scenarios) {
        json o{{"name", s.name},
               {"start_container", net.containers[s.start_container].id},
               {"end_container", net.containers[s.end_container].id},
               {"max_nontraversal_per_connection", s.max_nontraversal_per_connection},
               {"revisit_policy", to_string(s.revisit_policy)},
               {"branch_on_traversal_rules", s.branch_on_traversal_rules}};
        o["pre_ignore_missing"] =
            sorted_ids(s.pre_ignore_missing, [](const std::string& v) { return v; });
        o["post_ignore_facts"] =
            sorted_ids(s.post_ignore_facts, [&](uint32_t v) { return net.facts[v].id; });
        o["post_ignore_cpids"] = sorted_ids(
            s.post_ignore_cpids, [&](uint32_t v) { return net.common_properties[v].id; });
        o["post_create_cpids"] = sorted_ids(
            s.post_create_cpids, [&](uint32_t v) { return net.common_properties[v].id; });
        json ov = json::object();
        for (const auto& [fi, val] : s.initial_overrides) ov[net.facts[fi].id] = val.to_json();
        o["initial_overrides"] = std::move(ov);
        if (s.max_connections) o["max_connections"] = *s.max_connections;
        if (s.time_limit) o["time_limit_ms"] = s.time_limit->count();
        doc["scenarios"].push_back(std::move(o));
    }
    return doc;
}

inline std::string model_hash(const Network& net) {
    return detail::sha256_hex(serialize_model(net).dump());
}

inline std::vector<Diagnostic> validate_model(const Network& net) {
    std::vector<Diagnostic> out;
    auto flag = [&](const std::string& id, std::string msg) {
        out.push_back(Diagnostic{id, std::move(msg)});
    };
    const Decimal zero;
    const Decimal one = Decimal::from_int(1);

    for (const auto& l : net.links)
        if (l.traversability < zero || l.traversability > one)
            flag(l.id, "traversability " + l.traversability.str() + " outside [0,1]");

    for (const auto& a : net.actions)
        if (a.command.empty()) flag(a.id, "action command is empty");

    // Container parent chains must be acyclic.
    for (uint32_t ci = 0; ci < net.containers.size(); ++ci) {
        uint32_t slow = ci, fast = ci;
        while (true) {
            if (!net.containers[fast].parent) break;
            fast = *net.containers[fast].parent;
            if (!net.containers[fast].parent) break;
            fast = *net.containers[fast].parent;
            slow = *net.containers[slow].parent;
            if (slow == fast) {
                flag(net.containers[ci].id, "container parent chain forms a cycle");
                break;
            }
        }
    }

    // At most one fact per common property within an entity.
    auto check_owner = [&](const std::string& id, const std::vector<uint32_t>& facts) {
        std::unordered_set<uint32_t> seen;
        for (uint32_t fi : facts)
            if (net.facts[fi].cp && !seen.insert(*net.facts[fi].cp).second)
                flag(id, "holds more than one fact for common property '" +
                             net.common_properties[*net.facts[fi].cp].id + "'");
    };
    for (const auto& c : net.containers) check_owner(c.id, c.facts);
    for (const auto& l : net.links) check_owner(l.id, l.facts);
    check_owner("network", net.network_facts);

    static const std::unordered_set<std::string> reserved = {"container1", "link", "container2",
                                                             "network"};
    for (const auto& c : net.containers)
        if (reserved.count(c.id))
            flag(c.id, "container id collides with a location keyword");
    for (const auto& l : net.links)
        if (reserved.count(l.id)) flag(l.id, "link id collides with a location keyword");

    std::unordered_set<std::string> cond_ids;
    for (const auto& r : net.rules) {
        if (r.cia.confidentiality < zero || r.cia.confidentiality > one ||
            r.cia.integrity < zero || r.cia.integrity > one || r.cia.availability < zero ||
            r.cia.availability > one)
            flag(r.id, "CIA metrics must lie in [0,1]");
        if (r.run_time < zero) flag(r.id, "run_time is negative");

        auto slot_kinds = [&](const std::vector<Requirement>& reqs) {
            std::vector<ValueKind> kinds;
            for (const auto& rq : reqs)
                kinds.push_back(rq.by_cp ? net.common_properties[rq.index].kind
                                         : net.facts[rq.index].value.kind());
            return kinds;
        };

        for (const auto& p : r.preconditions) {
            if (!cond_ids.insert(p.id).second)
                flag(p.id, "condition id is not unique network-wide");
            if (!p.expression->is_compare_root()) {
                flag(p.id, "precondition expression root must be a comparison");
                continue;
            }
            auto kinds = slot_kinds(p.requirements);
            try {
                typecheck_expression(*p.expression, kinds);
            } catch (const TypeError& e) {
                flag(p.id, std::string("precondition does not typecheck: ") + e.what());
            }
            uint32_t max_used = count_inputs(*p.expression);
            if (max_used != p.requirements.size())
                flag(p.id, "expression uses " + std::to_string(max_used) + " input slots but " +
                               std::to_string(p.requirements.size()) + " requirements are bound");
        }
        for (const auto& p : r.postconditions) {
            if (!cond_ids.insert(p.id).second)
                flag(p.id, "condition id is not unique network-wide");
            if (p.expression->is_compare_root())
                flag(p.id, "postcondition expression root must produce a value");
            auto kinds = slot_kinds(p.requirements);
            ValueKind result;
            try {
                result = typecheck_expression(*p.expression, kinds);
            } catch (const TypeError& e) {
                flag(p.id, std::string("postcondition does not typecheck: ") + e.what());
                continue;
            }
            uint32_t max_used = count_inputs(*p.expression);
            if (max_used != p.requirements.size())
                flag(p.id, "expression uses " + std::to_string(max_used) + " input slots but " +
                               std::to_string(p.requirements.size()) + " requirements are bound");
            ValueKind want;
            if (p.target.kind == PostTarget::Kind::fact)
                want = net.facts[p.target.fact].value.kind();
            else
                want = net.common_properties[p.target.cp].kind;
            if (result != want)
                flag(p.id, std::string("postcondition produces ") + to_string(result) +
                               " but its target requires " + to_string(want));
        }
    }

    for (const auto& s : net.scenarios) {
        for (const auto& [fi, val] : s.initial_overrides)
            if (val.kind() != net.facts[fi].value.kind())
                flag(s.name, "override for fact '" + net.facts[fi].id + "' is " +
                                 to_string(val.kind()) + " but the fact is " +
                                 to_string(net.facts[fi].value.kind()));
    }
    return out;
}

}  // namespace twinpath
