#pragma once

namespace fom::detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace fom::detail
