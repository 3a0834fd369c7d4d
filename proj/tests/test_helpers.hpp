// GoogleTest helpers on top of the shared generators.
#ifndef SPARSE_PHASE_TEST_HELPERS_HPP
#define SPARSE_PHASE_TEST_HELPERS_HPP

#include <gtest/gtest.h>

#include <sparse_phase/error.hpp>

#include "generators.hpp"

namespace test_support
{

/// Kind of the sparse_phase::Error thrown by `f`; a test failure if none.
template <typename F>
sparse_phase::ErrorKind kind_of(const F& f)
{
    try
    {
        f();
    }
    catch (const sparse_phase::Error& e)
    {
        return e.kind();
    }
    ADD_FAILURE() << "no sparse_phase::Error thrown";
    return sparse_phase::ErrorKind::InvalidArgument;
}

} // namespace test_support

#endif
