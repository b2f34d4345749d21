/*
 * Copyright 2026 The cwishart Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace cwishart {

/// Base class of every error raised by the library.
///
/// Each subclass carries the process exit code the command-line tool uses
/// when the error escapes to the top level.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

/// Invalid input data or violated precondition (bad file content, out of
/// range parameter, unsupported configuration).
class ValueError : public Error
{
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// A numerical procedure failed (non-convergence, loss of precision,
/// unsupported degenerate regime).
class NumericError : public Error
{
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Reading or writing a file or directory failed.
class IoError : public Error
{
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

}  // namespace cwishart
