/* CWE561_case_39 line 1 */
/* CWE561_case_39 line 2 */
/* CWE561_case_39 line 3 */
/* CWE561_case_39 line 4 */
/* CWE561_case_39 line 5 */
/* CWE561_case_39 line 6 */
/* CWE561_case_39 line 7 */
/* CWE561_case_39 line 8 */
/* CWE561_case_39 line 9 */
/* CWE561_case_39 line 10 */
/* CWE561_case_39 line 11 */
/* CWE561_case_39 line 12 */
/* CWE561_case_39 line 13 */
/* CWE561_case_39 line 14 */
/* CWE561_case_39 line 15 */
/* CWE561_case_39 line 16 */
/* CWE561_case_39 line 17 */
/* CWE561_case_39 line 18 */
/* CWE561_case_39 line 19 */
/* CWE561_case_39 line 20 */
/* CWE561_case_39 line 21 */
/* CWE561_case_39 line 22 */
/* CWE561_case_39 line 23 */
/* CWE561_case_39 line 24 */
/* CWE561_case_39 line 25 */
/* CWE561_case_39 line 26 */
/* CWE561_case_39 line 27 */
/* CWE561_case_39 line 28 */
/* CWE561_case_39 line 29 */
/* CWE561_case_39 line 30 */
/* CWE561_case_39 line 31 */
/* CWE561_case_39 line 32 */
/* CWE561_case_39 line 33 */
/* CWE561_case_39 line 34 */
/* CWE561_case_39 line 35 */
/* CWE561_case_39 line 36 */
/* CWE561_case_39 line 37 */
/* CWE561_case_39 line 38 */
/* CWE561_case_39 line 39 */
/* CWE561_case_39 line 40 */
/* CWE561_case_39 line 41 */
/* CWE561_case_39 line 42 */
/* CWE561_case_39 line 43 */
/* CWE561_case_39 line 44 */
/* CWE561_case_39 line 45 */
/* CWE561_case_39 line 46 */
/* CWE561_case_39 line 47 */
/* CWE561_case_39 line 48 */
/* CWE561_case_39 line 49 */
/* CWE561_case_39 line 50 */
/* CWE561_case_39 line 51 */
/* CWE561_case_39 line 52 */
/* CWE561_case_39 line 53 */
/* CWE561_case_39 line 54 */
/* CWE561_case_39 line 55 */
/* CWE561_case_39 line 56 */
/* CWE561_case_39 line 57 */
/* CWE561_case_39 line 58 */
/* CWE561_case_39 line 59 */
/* CWE561_case_39 line 60 */
