#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rearrange/instance.hpp"

namespace rearrange {

/// Malformed instance or plan document. The message names the offending
/// location, e.g. "objects[2].w: expected a number".
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string instance_to_json(const Instance& inst);
/// Throws ParseError on a malformed document, or one whose arrangements are
/// infeasible.
Instance instance_from_json(std::string_view text);

std::string plan_to_json(const RearrangementPlan& plan);
RearrangementPlan plan_from_json(std::string_view text);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);
RearrangementPlan load_plan(const std::filesystem::path& path);
void save_plan(const RearrangementPlan& plan, const std::filesystem::path& path);

}  // namespace rearrange
