#pragma once

namespace hadfix::detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace hadfix::detail
