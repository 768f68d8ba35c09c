#pragma once

namespace gasket {

template <class S>
struct LineFunction;

}  // namespace gasket
