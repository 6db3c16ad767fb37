/*
 * Copyright 2026 The latentid authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
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

namespace latentid {

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input.  Carries the 1-based line number when known.
class parse_error : public error {
public:
    explicit parse_error(const std::string& msg, long line = 0)
        : error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class cycle_error : public error {
public:
    using error::error;
};

class index_error : public error {
public:
    using error::error;
};

class size_error : public error {
public:
    using error::error;
};

class singular_error : public error {
public:
    using error::error;
};

class shape_error : public error {
public:
    using error::error;
};

class domain_error : public error {
public:
    using error::error;
};

/// A soundness invariant that should be unbreakable was breached.
class consistency_error : public error {
public:
    using error::error;
};

}  // namespace latentid
