#include "permutex/io.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace permutex {

  using json = nlohmann::ordered_json;

  namespace {
    std::string read_file(std::filesystem::path const& path) {
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        throw ResolutionError("cannot open '" + path.string() + "'");
      }
      std::ostringstream buffer;
      buffer << in.rdbuf();
      return buffer.str();
    }

    json parse_json(std::string_view text) {
      try {
        return json::parse(text);
      } catch (json::parse_error const& e) {
        std::size_t line = 1;
        std::size_t col  = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
          if (text[i] == '\n') {
            ++line;
            col = 1;
          } else {
            ++col;
          }
        }
        throw ParseError("malformed JSON", line, col);
      }
    }

    // Field access that reports schema problems as parse errors.
    json const& field(json const& j, char const* key, std::string const& where) {
      if (!j.is_object() || !j.contains(key)) {
        throw ParseError(where + ": missing field '" + key + "'");
      }
      return j.at(key);
    }

    template <typename T>
    T as(json const& j, std::string const& where) {
      try {
        return j.get<T>();
      } catch (json::exception const&) {
        throw ParseError(where + ": value has the wrong type");
      }
    }

    std::size_t positive(json const& j, std::string const& where) {
      auto v = as<long long>(j, where);
      if (v < 1) {
        throw ParseError(where + ": carrier must be at least 1");
      }
      return static_cast<std::size_t>(v);
    }

    FiniteAlgebra algebra_from_json(json const& j, std::string const& where) {
      auto   name    = as<std::string>(field(j, "name", where), where + ".name");
      auto   size    = positive(field(j, "carrier", where), where + ".carrier");
      auto&& ops_json = field(j, "ops", where);
      if (!ops_json.is_array()) {
        throw ParseError(where + ".ops: expected a list");
      }
      std::vector<OpTable> ops;
      for (std::size_t i = 0; i < ops_json.size(); ++i) {
        std::string at = where + ".ops[" + std::to_string(i) + "]";
        OpTable     op;
        op.name  = as<std::string>(field(ops_json[i], "name", at), at + ".name");
        op.arity = as<unsigned>(field(ops_json[i], "arity", at), at + ".arity");
        op.table = as<std::vector<Element>>(field(ops_json[i], "table", at), at + ".table");
        ops.push_back(std::move(op));
      }
      try {
        return FiniteAlgebra(std::move(name), Carrier(size), std::move(ops));
      } catch (DimensionError const& e) {
        throw ParseError(where + ": " + e.what());
      } catch (PreconditionError const& e) {
        throw ParseError(where + ": " + e.what());
      }
    }

    // dump(2) with arrays of numbers kept on one line.
    std::string pretty(json const& j) {
      std::string const text = j.dump(2);
      std::string       out;
      out.reserve(text.size());
      for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '[') {
          std::size_t close = text.find(']', i);
          bool        flat  = close != std::string::npos && close > i + 1;
          for (std::size_t k = i + 1; flat && k < close; ++k) {
            char ch = text[k];
            flat    = std::isdigit(static_cast<unsigned char>(ch)) || ch == ',' || ch == ' '
                   || ch == '\n' || ch == '-';
          }
          if (flat) {
            out += '[';
            bool sep = false;
            for (std::size_t k = i + 1; k < close; ++k) {
              char ch = text[k];
              if (ch == ',') {
                sep = true;
              } else if (ch != ' ' && ch != '\n') {
                if (sep) {
                  out += ", ";
                  sep = false;
                }
                out += ch;
              }
            }
            out += ']';
            i = close;
            continue;
          }
        }
        out += text[i];
      }
      return out + "\n";
    }

    json algebra_to_json(FiniteAlgebra const& a) {
      json ops = json::array();
      for (auto const& op : a.ops()) {
        ops.push_back({{"name", op.name}, {"arity", op.arity}, {"table", op.table}});
      }
      return {{"name", a.name()}, {"carrier", a.size()}, {"ops", ops}};
    }

    // Shape tables: role names of objects and morphisms (name, from, to).
    struct MorphismRole {
      char const* name;
      char const* from;
      char const* to;
    };

    struct ShapeRoles {
      std::vector<char const*>  objects;
      std::vector<MorphismRole> morphisms;
    };

    ShapeRoles const& roles_of(std::string const& shape) {
      static std::map<std::string, ShapeRoles> const table = {
          {"fork",
           {{"R", "A", "B"}, {{"r1", "R", "A"}, {"r2", "R", "A"}, {"f", "A", "B"}}}},
          {"span", {{"X", "Y", "Z"}, {{"f", "X", "Y"}, {"g", "X", "Z"}}}},
          {"square",
           {{"C", "A", "D", "B"},
            {{"c", "C", "A"},
             {"g", "C", "D"},
             {"d", "D", "B"},
             {"f", "A", "B"},
             {"s", "B", "A"},
             {"t", "D", "C"}}}},
          {"cube",
           {{"C", "A", "D", "B", "W", "Y"},
            {{"c", "C", "A"},
             {"g", "C", "D"},
             {"d", "D", "B"},
             {"f", "A", "B"},
             {"s", "B", "A"},
             {"t", "D", "C"},
             {"w", "W", "Y"},
             {"delta", "W", "D"},
             {"beta", "Y", "B"}}}},
          {"cuboid",
           {{"T", "V", "X", "R_w", "W", "Y", "R_c", "C", "A", "S", "D", "B"},
            {{"t1", "T", "V"},         {"t2", "T", "V"},
             {"v", "V", "X"},          {"w1", "R_w", "W"},
             {"w2", "R_w", "W"},       {"w", "W", "Y"},
             {"c1", "R_c", "C"},       {"c2", "R_c", "C"},
             {"c", "C", "A"},          {"s1", "S", "D"},
             {"s2", "S", "D"},         {"d", "D", "B"},
             {"kbar", "T", "R_w"},     {"gammabar", "T", "R_c"},
             {"deltabar", "R_w", "S"}, {"gbar", "R_c", "S"},
             {"k", "V", "W"},          {"gamma", "V", "C"},
             {"delta", "W", "D"},      {"g", "C", "D"},
             {"h", "X", "Y"},          {"alpha", "X", "A"},
             {"beta", "Y", "B"},       {"f", "A", "B"}}}},
      };
      auto it = table.find(shape);
      if (it == table.end()) {
        throw ParseError("unknown diagram shape '" + shape + "'");
      }
      return it->second;
    }

    constexpr MorphismRole cuboid_sections[] = {{"tbar", "S", "R_c"},
                                                {"t", "D", "C"},
                                                {"s", "B", "A"},
                                                {"jbar", "R_w", "T"},
                                                {"j", "W", "V"},
                                                {"i", "Y", "X"}};

    void add_object(LabeledDiagram& d, std::string name, FiniteAlgebra const& x) {
      d.objects.emplace_back(std::move(name), x);
    }

    void add_morphism(LabeledDiagram&      d,
                      std::string          name,
                      std::string          from,
                      std::string          to,
                      FunctionArrow const& f) {
      d.morphisms.push_back({std::move(name), std::move(from), std::move(to), f});
    }

    void check_roles(LabeledDiagram const& d, std::string const& shape) {
      if (d.shape != shape) {
        throw StructuralError("expected a " + shape + " diagram, got a " + d.shape);
      }
      auto const& roles = roles_of(shape);
      for (auto const& m : roles.morphisms) {
        auto const& entry = d.morphism(m.name);
        if (entry.from != m.from || entry.to != m.to) {
          throw StructuralError("morphism " + std::string(m.name) + " must go from "
                                + m.from + " to " + m.to);
        }
      }
    }

    FunctionArrow const& map(LabeledDiagram const& d, char const* name) {
      return d.morphism(name).map;
    }
  }  // namespace

  ////////////////////////////////////////////////////////////////////////
  // Algebras
  ////////////////////////////////////////////////////////////////////////

  FiniteAlgebra parse_algebra(std::string_view text) {
    return algebra_from_json(parse_json(text), "algebra");
  }

  FiniteAlgebra load_algebra(std::filesystem::path const& path) {
    return parse_algebra(read_file(path));
  }

  std::string serialize_algebra(FiniteAlgebra const& a) {
    return pretty(algebra_to_json(a));
  }

  ////////////////////////////////////////////////////////////////////////
  // LabeledDiagram
  ////////////////////////////////////////////////////////////////////////

  FiniteAlgebra const& LabeledDiagram::object(std::string const& name) const {
    for (auto const& [n, x] : objects) {
      if (n == name) {
        return x;
      }
    }
    throw ResolutionError("diagram has no object '" + name + "'");
  }

  NamedMorphism const& LabeledDiagram::morphism(std::string const& name) const {
    for (auto const& m : morphisms) {
      if (m.name == name) {
        return m;
      }
    }
    throw ResolutionError("diagram has no morphism '" + name + "'");
  }

  bool LabeledDiagram::has_morphism(std::string const& name) const {
    for (auto const& m : morphisms) {
      if (m.name == name) {
        return true;
      }
    }
    return false;
  }

  LabeledDiagram label(Fork const& fork) {
    auto const&    p = fork.parts();
    LabeledDiagram d{"fork", fork.backend(), {}, {}};
    add_object(d, "R", p.R);
    add_object(d, "A", p.A);
    add_object(d, "B", p.B);
    add_morphism(d, "r1", "R", "A", p.r1);
    add_morphism(d, "r2", "R", "A", p.r2);
    add_morphism(d, "f", "A", "B", p.f);
    return d;
  }

  LabeledDiagram label(SquareDiagram const& sq) {
    auto const&    p = sq.parts();
    LabeledDiagram d{"square", sq.backend(), {}, {}};
    add_object(d, "C", p.C);
    add_object(d, "A", p.A);
    add_object(d, "D", p.D);
    add_object(d, "B", p.B);
    add_morphism(d, "c", "C", "A", p.c);
    add_morphism(d, "g", "C", "D", p.g);
    add_morphism(d, "d", "D", "B", p.d);
    add_morphism(d, "f", "A", "B", p.f);
    add_morphism(d, "s", "B", "A", p.s);
    add_morphism(d, "t", "D", "C", p.t);
    return d;
  }

  LabeledDiagram label(CubeDiagram const& cube, bool derived) {
    auto const&    p = cube.parts();
    LabeledDiagram d = label(p.front);
    d.shape          = "cube";
    add_object(d, "W", p.W);
    add_object(d, "Y", p.Y);
    add_morphism(d, "w", "W", "Y", p.w);
    add_morphism(d, "delta", "W", "D", p.delta);
    add_morphism(d, "beta", "Y", "B", p.beta);
    if (derived) {
      auto const& V = cube.back_corner();
      auto const& X = cube.front_corner();
      add_object(d, "V", V.object);
      add_object(d, "X", X.object);
      add_morphism(d, "k", "V", "W", V.first);
      add_morphism(d, "gamma", "V", "C", V.second);
      add_morphism(d, "h", "X", "Y", X.first);
      add_morphism(d, "alpha", "X", "A", X.second);
      add_morphism(d, "j", "W", "V", cube.j());
      add_morphism(d, "i", "Y", "X", cube.i());
      add_morphism(d, "v", "V", "X", cube_comparison(cube).v);
    }
    return d;
  }

  LabeledDiagram label(CuboidDiagram const& cuboid) {
    auto const&    p = cuboid.parts();
    LabeledDiagram d{"cuboid", cuboid.backend(), {}, {}};
    for (auto const& [name, obj] :
         {std::pair{"T", &p.T}, {"V", &p.V}, {"X", &p.X}, {"R_w", &p.Rw},
          {"W", &p.W}, {"Y", &p.Y}, {"R_c", &p.Rc}, {"C", &p.C}, {"A", &p.A},
          {"S", &p.S}, {"D", &p.D}, {"B", &p.B}}) {
      add_object(d, name, *obj);
    }
    FunctionArrow const* maps[] = {&p.t1,       &p.t2,       &p.v,     &p.w1,
                                   &p.w2,       &p.w,        &p.c1,    &p.c2,
                                   &p.c,        &p.s1,       &p.s2,    &p.d,
                                   &p.kbar,     &p.gammabar, &p.deltabar,
                                   &p.gbar,     &p.k,        &p.gamma, &p.delta,
                                   &p.g,        &p.h,        &p.alpha, &p.beta,
                                   &p.f};
    auto const& roles = roles_of("cuboid").morphisms;
    for (std::size_t i = 0; i < roles.size(); ++i) {
      add_morphism(d, roles[i].name, roles[i].from, roles[i].to, *maps[i]);
    }
    if (p.sections) {
      auto const&          s           = *p.sections;
      FunctionArrow const* sec_maps[] = {&s.tbar, &s.t, &s.s, &s.jbar, &s.j, &s.i};
      for (std::size_t i = 0; i < 6; ++i) {
        auto const& r = cuboid_sections[i];
        add_morphism(d, r.name, r.from, r.to, *sec_maps[i]);
      }
    }
    return d;
  }

  LabeledDiagram label_span(Backend const&       b,
                            FiniteAlgebra const& x,
                            FiniteAlgebra const& y,
                            FiniteAlgebra const& z,
                            FunctionArrow const& f,
                            FunctionArrow const& g) {
    LabeledDiagram d{"span", b, {}, {}};
    add_object(d, "X", x);
    add_object(d, "Y", y);
    add_object(d, "Z", z);
    add_morphism(d, "f", "X", "Y", f);
    add_morphism(d, "g", "X", "Z", g);
    return d;
  }

  Fork fork_from(LabeledDiagram const& d) {
    check_roles(d, "fork");
    return Fork(d.backend,
                {d.object("R"), d.object("A"), d.object("B"), map(d, "r1"),
                 map(d, "r2"), map(d, "f")});
  }

  SquareDiagram square_from(LabeledDiagram const& d) {
    if (d.shape != "cube") {
      check_roles(d, "square");
    }
    return SquareDiagram(d.backend,
                         {d.object("C"), d.object("A"), d.object("D"), d.object("B"),
                          map(d, "c"), map(d, "g"), map(d, "d"), map(d, "f"),
                          map(d, "s"), map(d, "t")});
  }

  CubeDiagram cube_from(LabeledDiagram const& d) {
    check_roles(d, "cube");
    return CubeDiagram({square_from(d), d.object("W"), d.object("Y"), map(d, "w"),
                        map(d, "delta"), map(d, "beta")});
  }

  CuboidDiagram cuboid_from(LabeledDiagram const& d) {
    check_roles(d, "cuboid");
    std::optional<CuboidDiagram::Sections> sections;
    std::size_t                            present = 0;
    for (auto const& r : cuboid_sections) {
      present += d.has_morphism(r.name) ? 1 : 0;
    }
    if (present != 0 && present != 6) {
      throw StructuralError("a split cuboid needs all six sections tbar, t, s, jbar, j, i");
    }
    if (present == 6) {
      for (auto const& r : cuboid_sections) {
        auto const& m = d.morphism(r.name);
        if (m.from != r.from || m.to != r.to) {
          throw StructuralError("section " + std::string(r.name) + " must go from "
                                + r.from + " to " + r.to);
        }
      }
      sections = CuboidDiagram::Sections{map(d, "tbar"), map(d, "t"), map(d, "s"),
                                         map(d, "jbar"), map(d, "j"), map(d, "i")};
    }
    CuboidDiagram::Parts parts{
        .T        = d.object("T"),
        .V        = d.object("V"),
        .X        = d.object("X"),
        .t1       = map(d, "t1"),
        .t2       = map(d, "t2"),
        .v        = map(d, "v"),
        .Rw       = d.object("R_w"),
        .W        = d.object("W"),
        .Y        = d.object("Y"),
        .w1       = map(d, "w1"),
        .w2       = map(d, "w2"),
        .w        = map(d, "w"),
        .Rc       = d.object("R_c"),
        .C        = d.object("C"),
        .A        = d.object("A"),
        .c1       = map(d, "c1"),
        .c2       = map(d, "c2"),
        .c        = map(d, "c"),
        .S        = d.object("S"),
        .D        = d.object("D"),
        .B        = d.object("B"),
        .s1       = map(d, "s1"),
        .s2       = map(d, "s2"),
        .d        = map(d, "d"),
        .kbar     = map(d, "kbar"),
        .gammabar = map(d, "gammabar"),
        .deltabar = map(d, "deltabar"),
        .gbar     = map(d, "gbar"),
        .k        = map(d, "k"),
        .gamma    = map(d, "gamma"),
        .delta    = map(d, "delta"),
        .g        = map(d, "g"),
        .h        = map(d, "h"),
        .alpha    = map(d, "alpha"),
        .beta     = map(d, "beta"),
        .f        = map(d, "f"),
        .sections = std::move(sections),
    };
    return CuboidDiagram(d.backend, std::move(parts));
  }

  ////////////////////////////////////////////////////////////////////////
  // Diagram files
  ////////////////////////////////////////////////////////////////////////

  LabeledDiagram parse_diagram(std::string_view text, std::filesystem::path const& base_dir) {
    json const root  = parse_json(text);
    auto       shape = as<std::string>(field(root, "shape", "diagram"), "diagram.shape");
    auto const& roles = roles_of(shape);

    json const& objects   = field(root, "objects", "diagram");
    json const& morphisms = field(root, "morphisms", "diagram");
    json const  role_map  = root.contains("roles") ? root.at("roles") : json::object();
    if (!objects.is_object() || !morphisms.is_object() || !role_map.is_object()) {
      throw ParseError("diagram: 'objects', 'morphisms' and 'roles' must be maps");
    }
    auto entry_name = [&](std::string const& role) {
      if (role_map.contains(role)) {
        return as<std::string>(role_map.at(role), "diagram.roles." + role);
      }
      return role;
    };

    LabeledDiagram d;
    d.shape = shape;
    std::map<std::string, std::string> role_of_entry;
    std::optional<Signature>           signature;
    bool                               algebraic = false;

    auto read_object = [&](std::string const& role) {
      std::string name  = entry_name(role);
      std::string where = "diagram.objects." + name;
      if (!objects.contains(name)) {
        throw ParseError("diagram: missing object '" + name + "' for role " + role);
      }
      json const& o = objects.at(name);
      if (o.contains("algebra")) {
        json const& a = o.at("algebra");
        algebraic     = true;
        if (a.is_string()) {
          auto path = base_dir / as<std::string>(a, where);
          return load_algebra(path);
        }
        return algebra_from_json(a, where + ".algebra");
      }
      return FiniteAlgebra(Carrier(positive(field(o, "carrier", where), where + ".carrier")));
    };

    std::vector<char const*> object_roles = roles.objects;
    for (auto const* role : object_roles) {
      FiniteAlgebra x = read_object(role);
      if (!signature) {
        signature = x.signature();
      } else if (*signature != x.signature()) {
        throw ParseError("diagram: object '" + entry_name(role)
                         + "' has a different signature from the others");
      }
      role_of_entry[entry_name(role)] = role;
      d.objects.emplace_back(role, std::move(x));
    }
    d.backend = algebraic ? Backend::algebras(*signature) : Backend::sets();

    std::vector<MorphismRole> morphism_roles = roles.morphisms;
    if (shape == "cuboid") {
      for (auto const& r : cuboid_sections) {
        if (morphisms.contains(entry_name(r.name))) {
          morphism_roles.push_back(r);
        }
      }
    }
    for (auto const& role : morphism_roles) {
      std::string name  = entry_name(role.name);
      std::string where = "diagram.morphisms." + name;
      if (!morphisms.contains(name)) {
        throw ParseError("diagram: missing morphism '" + name + "' for role " + role.name);
      }
      json const& m    = morphisms.at(name);
      auto        from = as<std::string>(field(m, "from", where), where + ".from");
      auto        to   = as<std::string>(field(m, "to", where), where + ".to");
      if (!role_of_entry.contains(from) || !role_of_entry.contains(to)) {
        throw ParseError(where + ": unknown endpoint");
      }
      auto const& src = d.object(role_of_entry[from]);
      auto const& dst = d.object(role_of_entry[to]);
      auto table = as<std::vector<Element>>(field(m, "table", where), where + ".table");
      try {
        d.morphisms.push_back({role.name,
                               role_of_entry[from],
                               role_of_entry[to],
                               FunctionArrow(src.carrier(), dst.carrier(), std::move(table))});
      } catch (DimensionError const& e) {
        throw ParseError(where + ": " + e.what());
      }
    }
    return d;
  }

  LabeledDiagram load_diagram(std::filesystem::path const& path) {
    return parse_diagram(read_file(path), path.parent_path());
  }

  std::string serialize_diagram(LabeledDiagram const& d) {
    // Keys are kept in role order rather than sorted so files diff cleanly
    // against hand-written fixtures.
    json objects = json::object();
    for (auto const& [name, x] : d.objects) {
      if (d.backend.is_set()) {
        objects[name] = {{"carrier", x.size()}};
      } else {
        objects[name] = {{"algebra", algebra_to_json(x)}};
      }
    }
    json morphisms = json::object();
    for (auto const& m : d.morphisms) {
      morphisms[m.name] = {{"from", m.from}, {"to", m.to}, {"table", m.map.table()}};
    }
    json root = {{"shape", d.shape}, {"objects", objects}, {"morphisms", morphisms}};
    return pretty(root);
  }

  Environment environment(LabeledDiagram const& d) {
    LabeledDiagram const full = d.shape == "cube" ? label(cube_from(d), true) : d;
    Environment          env;
    for (auto const& [name, x] : full.objects) {
      env.bind_carrier(name, x.carrier());
    }
    for (auto const& m : full.morphisms) {
      env.bind(m.name, m.map);
    }
    return env;
  }

  std::string to_dot(LabeledDiagram const& d, std::set<std::string> const& highlight) {
    std::ostringstream out;
    out << "digraph " << d.shape << " {\n";
    out << "  node [shape=box];\n";
    for (auto const& [name, x] : d.objects) {
      out << "  \"" << name << "\" [label=\"" << name << " (" << x.size() << ")\"];\n";
    }
    for (auto const& m : d.morphisms) {
      out << "  \"" << m.from << "\" -> \"" << m.to << "\" [label=\"" << m.name << "\"";
      if (highlight.contains(m.name)) {
        out << ", color=red, fontcolor=red, penwidth=2";
      }
      out << "];\n";
    }
    out << "}\n";
    return out.str();
  }

}  // namespace permutex
