#pragma once

// The check / norm / example / fuzz commands, as functions from inputs to an
// exit code and key=value report lines. The executable in tools/ only parses
// flags and forwards here.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fell/gallery.hpp"
#include "fell/io.hpp"
#include "fell/reps.hpp"

namespace fell {

enum ExitCode : int { exit_ok = 0, exit_violation = 1, exit_input = 2 };

struct CommandOptions {
  double tol = 1e-9;
  std::size_t samples = 100;
  std::uint64_t seed = 0;
  std::optional<std::string> section;
};

std::string format_real(double x);

std::string read_text_file(const std::string& path);

/// Groupoid laws, the ten bundle axioms, saturation, and any representations
/// stored in the file.
int cmd_check(const std::string& path, const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// Norm table for one named section, or for every section in the file.
int cmd_norm(const std::string& path, const CommandOptions& opt, std::ostream& out, std::ostream& err);

/// A gallery bundle as a document with sections `unit`, `zero` and `f`
/// (f has coordinates 1 over units and i elsewhere).
BundleDocument example_document(const std::string& name, const std::vector<std::string>& args);

int cmd_example(const std::string& name, const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ---------------------------------------------------------------------------
// Fuzzing

struct FuzzLimits {
  std::size_t max_elements = 12;
  std::size_t max_fiber_dim = 3;
};

enum class FuzzBundleKind { trivial, diagonal, unit_blocks };

inline const char* to_string(FuzzBundleKind k) {
  switch (k) {
    case FuzzBundleKind::trivial: return "trivial";
    case FuzzBundleKind::diagonal: return "diagonal";
    case FuzzBundleKind::unit_blocks: return "unit_blocks";
  }
  return "?";
}

/// A connected piece of a fuzz groupoid, with block data for its units when
/// the bundle kind needs it.
struct FuzzComponent {
  bool is_pair = false;  // pair groupoid on `size` points, else Z/size
  std::size_t size = 1;
  std::vector<std::vector<std::size_t>> unit_blocks;  // one block list per unit
};

struct FuzzCase {
  std::uint64_t seed = 0;
  std::size_t index = 0;
  FuzzBundleKind kind = FuzzBundleKind::trivial;
  std::size_t diagonal_dim = 1;
  std::vector<FuzzComponent> components;

  std::string describe() const {
    std::string s = std::string(to_string(kind));
    if (kind == FuzzBundleKind::diagonal) s += "(C^" + std::to_string(diagonal_dim) + ")";
    s += " over";
    for (const auto& c : components) s += (c.is_pair ? " pair" : " z") + std::to_string(c.size);
    return s;
  }

  FiniteGroupoid groupoid() const {
    std::optional<FiniteGroupoid> G;
    for (const auto& c : components) {
      auto piece = c.is_pair ? pair_groupoid(c.size) : cyclic_group(c.size);
      G = G ? disjoint_union(*G, piece) : piece;
    }
    if (!G) throw InvalidArgument("fuzz case has no components");
    return *G;
  }

  FellBundle bundle() const {
    const auto G = groupoid();
    switch (kind) {
      case FuzzBundleKind::trivial: return build_trivial_line_bundle(G);
      case FuzzBundleKind::diagonal:
        return build_constant_fiber_bundle(G, MatrixStarAlgebra::from_blocks(std::vector<std::size_t>(diagonal_dim, 1)));
      case FuzzBundleKind::unit_blocks: {
        std::vector<MatrixStarAlgebra> fibers;
        for (const auto& c : components)
          for (const auto& b : c.unit_blocks) fibers.push_back(MatrixStarAlgebra::from_blocks(b));
        return build_unit_bundle(G, fibers);
      }
    }
    throw InternalInconsistency("unknown fuzz bundle kind");
  }
};

/// Deterministic in (seed, index): each case owns its own stream.
FuzzCase generate_fuzz_case(std::uint64_t seed, std::size_t index, const FuzzLimits& lim = {});

/// The invariant suite run on every fuzz case: groupoid laws, the bundle
/// axioms, the regular representation, the C*-identity, norm ordering
/// sup <= full <= I, adjoint-norm equality, and the bisection identities.
Report run_invariants(const FellBundle& B, const CommandOptions& opt, std::uint64_t stream);

struct FuzzOutcome {
  FuzzCase original;
  FuzzCase minimized;
  Report report;
};

/// Drops components while the case keeps failing.
FuzzCase minimize(FuzzCase fc, const CommandOptions& opt, std::uint64_t stream);

/// Runs `count` seeded cases. Failing cases are minimized and written to
/// `repro_dir` as bundle documents.
int cmd_fuzz(const CommandOptions& opt, std::size_t count, const FuzzLimits& lim, const std::string& repro_dir,
             std::ostream& out, std::ostream& err);

}  // namespace fell
