/* CWE476_case_18 line 1 */
/* CWE476_case_18 line 2 */
/* CWE476_case_18 line 3 */
/* CWE476_case_18 line 4 */
/* CWE476_case_18 line 5 */
/* CWE476_case_18 line 6 */
/* CWE476_case_18 line 7 */
/* CWE476_case_18 line 8 */
/* CWE476_case_18 line 9 */
/* CWE476_case_18 line 10 */
/* CWE476_case_18 line 11 */
/* CWE476_case_18 line 12 */
/* CWE476_case_18 line 13 */
/* CWE476_case_18 line 14 */
/* CWE476_case_18 line 15 */
/* CWE476_case_18 line 16 */
/* CWE476_case_18 line 17 */
/* CWE476_case_18 line 18 */
/* CWE476_case_18 line 19 */
/* CWE476_case_18 line 20 */
/* CWE476_case_18 line 21 */
/* CWE476_case_18 line 22 */
/* CWE476_case_18 line 23 */
/* CWE476_case_18 line 24 */
/* CWE476_case_18 line 25 */
/* CWE476_case_18 line 26 */
/* CWE476_case_18 line 27 */
/* CWE476_case_18 line 28 */
/* CWE476_case_18 line 29 */
/* CWE476_case_18 line 30 */
/* CWE476_case_18 line 31 */
/* CWE476_case_18 line 32 */
/* CWE476_case_18 line 33 */
/* CWE476_case_18 line 34 */
/* CWE476_case_18 line 35 */
/* CWE476_case_18 line 36 */
/* CWE476_case_18 line 37 */
/* CWE476_case_18 line 38 */
/* CWE476_case_18 line 39 */
/* CWE476_case_18 line 40 */
/* CWE476_case_18 line 41 */
/* CWE476_case_18 line 42 */
/* CWE476_case_18 line 43 */
/* CWE476_case_18 line 44 */
/* CWE476_case_18 line 45 */
/* CWE476_case_18 line 46 */
/* CWE476_case_18 line 47 */
/* CWE476_case_18 line 48 */
/* CWE476_case_18 line 49 */
/* CWE476_case_18 line 50 */
/* CWE476_case_18 line 51 */
/* CWE476_case_18 line 52 */
/* CWE476_case_18 line 53 */
/* CWE476_case_18 line 54 */
/* CWE476_case_18 line 55 */
/* CWE476_case_18 line 56 */
/* CWE476_case_18 line 57 */
/* CWE476_case_18 line 58 */
/* CWE476_case_18 line 59 */
/* CWE476_case_18 line 60 */
